#include "lattri/io.hpp"

#include "lattri/enumeration.hpp"
#include "lattri/error.hpp"

#include "json.hpp"

#include <openssl/evp.h>

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>

namespace lattri {

using nlohmann::json;

// ---------------------------------------------------------------- config

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool valid_key(const std::string& k) {
    if (k.empty()) return false;
    for (char c : k) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
                        c == '.' || c == '-';
        if (!ok) return false;
    }
    return true;
}

[[noreturn]] void field_error(const std::string& key, const std::string& value, const std::string& what) {
    fail(ErrorCode::ParseError, "field '" + key + "': " + what + " (got '" + value + "')");
}

} // namespace

Config Config::parse(const std::string& text) {
    Config c;
    std::istringstream in(text);
    std::string line;
    int no = 0;
    while (std::getline(in, line)) {
        ++no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            fail(ErrorCode::ParseError, "line " + std::to_string(no) + ": expected 'key = value'");
        }
        const std::string key = trim(t.substr(0, eq));
        if (!valid_key(key)) fail(ErrorCode::ParseError, "line " + std::to_string(no) + ": bad key '" + key + "'");
        if (c.kv_.count(key)) fail(ErrorCode::ParseError, "line " + std::to_string(no) + ": duplicate key '" + key + "'");
        c.kv_[key] = trim(t.substr(eq + 1));
    }
    return c;
}

std::string Config::print() const {
    std::string out;
    for (const auto& [k, v] : kv_) out += k + " = " + v + "\n";
    return out;
}

void Config::set(const std::string& key, const std::string& value) {
    if (!valid_key(key)) fail(ErrorCode::ParseError, "bad key '" + key + "'");
    if (value.find('\n') != std::string::npos) field_error(key, value, "value spans lines");
    kv_[key] = trim(value);
}

std::optional<std::string> Config::get(const std::string& key) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return std::nullopt;
    return it->second;
}

std::string Config::str(const std::string& key, const std::string& def) const {
    return get(key).value_or(def);
}

double Config::num(const std::string& key, double def) const {
    const auto v = get(key);
    if (!v) return def;
    char* end = nullptr;
    errno = 0;
    const double d = std::strtod(v->c_str(), &end);
    if (v->empty() || *end != '\0' || errno == ERANGE || !std::isfinite(d)) field_error(key, *v, "expected a number");
    return d;
}

std::int64_t Config::integer(const std::string& key, std::int64_t def) const {
    const auto v = get(key);
    if (!v) return def;
    char* end = nullptr;
    errno = 0;
    const long long i = std::strtoll(v->c_str(), &end, 10);
    if (!v->empty() && *end == '\0' && errno == 0) return i;
    const double d = num(key, 0.0);
    if (d != std::floor(d) || std::fabs(d) > 9.0e18) field_error(key, *v, "expected an integer");
    return std::int64_t(d);
}

std::uint64_t Config::seed(const std::string& key, std::uint64_t def) const {
    const auto v = get(key);
    if (!v) return def;
    char* end = nullptr;
    errno = 0;
    const unsigned long long s = std::strtoull(v->c_str(), &end, 10);
    if (v->empty() || (*v)[0] == '-' || *end != '\0' || errno != 0) field_error(key, *v, "expected an unsigned integer");
    return s;
}

// ---------------------------------------------------------------- parsing helpers

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

int parse_int(const std::string& s, const std::string& what) {
    char* end = nullptr;
    errno = 0;
    const long v = std::strtol(s.c_str(), &end, 10);
    if (s.empty() || *end != '\0' || errno != 0 || v < -1000000 || v > 1000000) {
        fail(ErrorCode::ParseError, what + ": expected an integer, got '" + s + "'");
    }
    return int(v);
}

// Doubled coordinate of a value given as integer or half-integer.
int parse_half(const std::string& s) {
    char* end = nullptr;
    const double d = std::strtod(s.c_str(), &end);
    if (s.empty() || *end != '\0' || !std::isfinite(d) || std::fabs(d) > 1e6) {
        fail(ErrorCode::ParseError, "expected a coordinate, got '" + s + "'");
    }
    const double dd = 2.0 * d;
    if (dd != std::floor(dd)) fail(ErrorCode::ParseError, "coordinate '" + s + "' is not a multiple of 1/2");
    return int(dd);
}

} // namespace

Edge parse_edge(const std::string& text) {
    const auto f = split(text, ',');
    if (f.size() != 4) fail(ErrorCode::ParseError, "edge '" + text + "': expected x0,y0,x1,y1");
    return Edge::lattice(parse_int(f[0], "edge"), parse_int(f[1], "edge"), parse_int(f[2], "edge"),
                         parse_int(f[3], "edge"));
}

std::vector<Edge> parse_edge_list(const std::string& text) {
    std::vector<Edge> out;
    if (trim(text).empty()) return out;
    for (const std::string& part : split(text, ';')) {
        if (!part.empty()) out.push_back(parse_edge(part));
    }
    return out;
}

Point parse_point(const std::string& text) {
    const auto f = split(text, ',');
    if (f.size() != 2) fail(ErrorCode::ParseError, "point '" + text + "': expected x,y");
    return Point{parse_half(f[0]), parse_half(f[1])};
}

std::string format_point(Point p) {
    auto one = [](int v2) {
        std::string s = std::to_string(v2 / 2);
        if (v2 % 2 != 0) {
            if (v2 < 0 && v2 / 2 == 0) s = "-0";
            s += ".5";
        }
        return s;
    };
    return one(p.x2) + "," + one(p.y2);
}

namespace {

// JSON polygons may list only corners; the lattice points along each side
// are inserted so every side is primitive.
std::vector<Point> with_side_points(const std::vector<Point>& corners) {
    std::vector<Point> out;
    for (std::size_t i = 0; i < corners.size(); ++i) {
        const Point a = corners[i], b = corners[(i + 1) % corners.size()];
        const int dx = (b.x2 - a.x2) / 2, dy = (b.y2 - a.y2) / 2;
        const int g = std::max(1, std::gcd(std::abs(dx), std::abs(dy)));
        for (int k = 0; k < g; ++k) out.push_back(Point{a.x2 + 2 * k * (dx / g), a.y2 + 2 * k * (dy / g)});
    }
    return out;
}

} // namespace

BoundaryPtr parse_region(const std::string& spec_in, const std::vector<Edge>& extra_in) {
    const std::string spec = trim(spec_in);
    std::vector<Edge> extra;
    std::shared_ptr<const Region> region;
    if (!spec.empty() && spec[0] == '{') {
        json j;
        try {
            j = json::parse(spec);
            std::vector<Point> poly;
            for (const auto& v : j.at("polygon")) poly.push_back(Point::lattice(v.at(0).get<int>(), v.at(1).get<int>()));
            if (j.contains("constraints")) {
                for (const auto& e : j.at("constraints")) {
                    extra.push_back(Edge::make(Point::lattice(e.at(0).at(0).get<int>(), e.at(0).at(1).get<int>()),
                                               Point::lattice(e.at(1).at(0).get<int>(), e.at(1).at(1).get<int>())));
                }
            }
            region = std::make_shared<const Region>(Region::build(with_side_points(poly)));
        } catch (const json::exception& e) {
            fail(ErrorCode::ParseError, std::string("region JSON: ") + e.what());
        }
    } else {
        const auto colon = spec.find(':');
        if (colon == std::string::npos) fail(ErrorCode::ParseError, "region '" + spec + "': expected kind:size or JSON");
        const std::string kind = spec.substr(0, colon), size = spec.substr(colon + 1);
        if (kind == "square") {
            region = std::make_shared<const Region>(Region::square(parse_int(size, "square size")));
        } else if (kind == "rect" || kind == "strip") {
            const auto x = size.find('x');
            if (x == std::string::npos) fail(ErrorCode::ParseError, "region '" + spec + "': expected AxB");
            const int a = parse_int(size.substr(0, x), "region size"), b = parse_int(size.substr(x + 1), "region size");
            // rect:WxH, strip:KxN with K the height
            region = std::make_shared<const Region>(kind == "rect" ? Region::rectangle(a, b) : Region::rectangle(b, a));
        } else {
            fail(ErrorCode::ParseError, "unknown region kind '" + kind + "'");
        }
    }
    extra.insert(extra.end(), extra_in.begin(), extra_in.end());
    return BoundaryCondition::make(region, std::move(extra));
}

BoundaryPtr region_from_config(const Config& cfg) {
    std::string spec = cfg.str("region", "");
    if (spec.empty()) fail(ErrorCode::ParseError, "field 'region': missing");
    if (spec[0] == '@') spec = read_file(spec.substr(1));
    return parse_region(spec, parse_edge_list(cfg.str("constraints", "")));
}

// ---------------------------------------------------------------- triangulations

std::string write_triangulation(const Triangulation& s) {
    std::ostringstream os;
    os << "# lattri triangulation v1\n";
    for (const Edge& e : s.edges()) {
        os << e.a.x2 / 2 << ' ' << e.a.y2 / 2 << ' ' << e.b.x2 / 2 << ' ' << e.b.y2 / 2 << '\n';
    }
    return os.str();
}

namespace {

std::vector<Edge> read_edge_lines(std::istream& in, int& line_no) {
    std::vector<Edge> edges;
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::istringstream ls(t);
        long v[4];
        std::string rest;
        if (!(ls >> v[0] >> v[1] >> v[2] >> v[3]) || (ls >> rest)) {
            fail(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected 'x0 y0 x1 y1'");
        }
        edges.push_back(Edge::lattice(int(v[0]), int(v[1]), int(v[2]), int(v[3])));
    }
    return edges;
}

} // namespace

Triangulation read_triangulation(const BoundaryPtr& bc, const std::string& text) {
    std::istringstream in(text);
    int no = 0;
    return Triangulation::from_edges(bc, read_edge_lines(in, no));
}

// ---------------------------------------------------------------- checkpoints

Checkpoint Checkpoint::of(const Chain& c) {
    Checkpoint cp;
    cp.lambda = c.lambda();
    cp.seed = c.seed();
    cp.steps = c.step_count();
    std::ostringstream os;
    os << c.rng().engine();
    cp.engine = os.str();
    cp.edges = c.state().edges();
    return cp;
}

std::string Checkpoint::to_text() const {
    std::ostringstream os;
    char lam[40];
    std::snprintf(lam, sizeof lam, "%.17g", lambda);
    os << "# lattri checkpoint v1\n";
    os << "lambda " << lam << '\n' << "seed " << seed << '\n' << "steps " << steps << '\n';
    os << "engine " << engine << '\n' << "edges\n";
    for (const Edge& e : edges) os << e.a.x2 / 2 << ' ' << e.a.y2 / 2 << ' ' << e.b.x2 / 2 << ' ' << e.b.y2 / 2 << '\n';
    return os.str();
}

Checkpoint Checkpoint::parse(const std::string& text) {
    Checkpoint cp;
    std::istringstream in(text);
    std::string line;
    int no = 0;
    bool have[4] = {false, false, false, false};
    while (std::getline(in, line)) {
        ++no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (t == "edges") {
            cp.edges = read_edge_lines(in, no);
            if (!(have[0] && have[1] && have[2] && have[3])) fail(ErrorCode::ParseError, "checkpoint header incomplete");
            return cp;
        }
        const auto sp = t.find(' ');
        const std::string key = t.substr(0, sp), val = sp == std::string::npos ? "" : trim(t.substr(sp + 1));
        char* end = nullptr;
        bool ok = !val.empty();
        if (key == "lambda") {
            cp.lambda = std::strtod(val.c_str(), &end);
            ok = ok && *end == '\0';
            have[0] = true;
        } else if (key == "seed") {
            cp.seed = std::strtoull(val.c_str(), &end, 10);
            ok = ok && *end == '\0';
            have[1] = true;
        } else if (key == "steps") {
            cp.steps = std::strtoull(val.c_str(), &end, 10);
            ok = ok && *end == '\0';
            have[2] = true;
        } else if (key == "engine") {
            cp.engine = val;
            have[3] = true;
        } else {
            fail(ErrorCode::ParseError, "line " + std::to_string(no) + ": unknown checkpoint field '" + key + "'");
        }
        if (!ok) fail(ErrorCode::ParseError, "line " + std::to_string(no) + ": bad value for '" + key + "'");
    }
    fail(ErrorCode::ParseError, "checkpoint has no edge section");
}

Chain Checkpoint::restore(const BoundaryPtr& bc) const {
    Chain c(Triangulation::from_edges(bc, edges), lambda, seed);
    std::mt19937_64 eng;
    std::istringstream is(engine);
    is >> eng;
    if (!is) fail(ErrorCode::ParseError, "checkpoint engine state is malformed");
    c.restore(steps, eng);
    return c;
}

// ---------------------------------------------------------------- SVG

namespace {

bool meets_edge(const Edge& e, const Edge& g) { return e == g || open_segments_intersect(e, g); }

} // namespace

std::string render_svg(const Triangulation& s, const SvgStyle& st) {
    const Region& r = s.region();
    const Point lo = r.min_corner(), hi = r.max_corner();
    const int W = (hi.x2 - lo.x2) / 2 * st.scale + 2 * st.margin;
    const int H = (hi.y2 - lo.y2) / 2 * st.scale + 2 * st.margin;
    auto X = [&](Point p) { return st.margin + (p.x2 - lo.x2) / 2 * st.scale; };
    auto Y = [&](Point p) { return st.margin + (hi.y2 - p.y2) / 2 * st.scale; };
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
       << ' ' << H << "\">\n";
    os << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    for (int x = 0; x < s.size(); ++x) {
        const Edge& e = s.edge(x);
        const char* colour = "#444444";
        double width = 1.5;
        if (st.classify) {
            if (s.boundary().is_constraint_midpoint(x)) {
                colour = "black";
                width = 2.5;
            } else if (s.is_flippable(x)) {
                colour = "#1f5fd6";
            } else {
                colour = "#9a9a9a";
            }
        }
        if (st.highlight) {
            if (e == *st.highlight) {
                colour = "#d62728";
                width = 3.0;
            } else if (meets_edge(e, *st.highlight)) {
                colour = "#ff7f0e";
                width = 2.5;
            }
        }
        char w[16];
        std::snprintf(w, sizeof w, "%.1f", width);
        os << "<line x1=\"" << X(e.a) << "\" y1=\"" << Y(e.a) << "\" x2=\"" << X(e.b) << "\" y2=\"" << Y(e.b)
           << "\" stroke=\"" << colour << "\" stroke-width=\"" << w << "\"/>\n";
    }
    os << "</svg>\n";
    return os.str();
}

// ---------------------------------------------------------------- files and hashes

std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
        fail(ErrorCode::Internal, "SHA-256 failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::IoError, "cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::IoError, "cannot write " + path);
    out.write(data.data(), std::streamsize(data.size()));
    if (!out) fail(ErrorCode::IoError, "write failed for " + path);
}

void RunManifest::add_artifact(const std::string& path, const std::string& content) {
    artifacts.push_back({path, sha256_hex(content), content.size()});
}

std::string RunManifest::to_json() const {
    json j;
    j["command"] = command;
    j["config"] = json::object();
    for (const auto& [k, v] : config.entries()) j["config"][k] = v;
    j["seeds"] = seeds;
    j["artifacts"] = json::array();
    for (const Artifact& a : artifacts) j["artifacts"].push_back({{"path", a.path}, {"sha256", a.sha256}, {"bytes", a.bytes}});
    j["wall_seconds"] = wall_seconds;
    j["steps_per_second"] = steps_per_second;
    return j.dump(2) + "\n";
}

// ---------------------------------------------------------------- experiments

ExperimentPlan plan_from_config(const Config& cfg) {
    ExperimentPlan p;
    p.bc = region_from_config(cfg);
    p.lambda = cfg.num("lambda", 0.5);
    p.seed = cfg.seed("seed", 1);
    p.replicas = int(cfg.integer("replicas", 4));
    p.burn_in = cfg.integer("burn_in", -1);
    p.interval = cfg.integer("interval", -1);
    p.samples = int(cfg.integer("samples", 100));
    p.threads = unsigned(std::max<std::int64_t>(0, cfg.integer("threads", 0)));
    p.check();
    return p;
}

Edge central_ground_edge(const GroundState& gs) {
    const Region& r = gs.boundary().region();
    const std::int64_t cx = r.min_corner().x2 + r.max_corner().x2, cy = r.min_corner().y2 + r.max_corner().y2;
    int x = -1;
    std::int64_t best = -1;
    for (int y = 0; y < r.midpoint_count(); ++y) {
        if (gs.boundary().is_constraint_midpoint(y)) continue;
        const Point p = r.midpoints()[std::size_t(y)];
        const std::int64_t d = std::llabs(2 * p.x2 - cx) + std::llabs(2 * p.y2 - cy);
        if (best < 0 || d < best) {
            best = d;
            x = y;
        }
    }
    if (x < 0) fail(ErrorCode::InvalidArgument, "region has no free midpoint");
    return gs.canonical_edge(x);
}

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names = {"tail",   "crossings",   "verticals", "coupling", "ground-frequency",
                                                   "degree", "contraction", "hitting",   "fkg-search"};
    return names;
}

namespace {

Rect parse_rect(const Config& cfg, const Region& r) {
    const auto v = cfg.get("rect");
    if (!v) return Rect{r.min_corner().x2 / 2, r.min_corner().y2 / 2, r.max_corner().x2 / 2, r.max_corner().y2 / 2};
    const auto f = split(*v, ',');
    if (f.size() != 4) field_error("rect", *v, "expected x0,y0,x1,y1");
    return Rect{parse_int(f[0], "rect"), parse_int(f[1], "rect"), parse_int(f[2], "rect"), parse_int(f[3], "rect")};
}

std::string b01(bool b) { return b ? "1" : "0"; }

int midpoint_from(const Config& cfg, const Region& r, const std::string& key) {
    const auto v = cfg.get(key);
    if (!v) return -1;
    const int x = r.midpoint_index(parse_point(*v));
    if (x < 0) field_error(key, *v, "not a midpoint of the region");
    return x;
}

// Ground edge from `g`, else the canonical one at `midpoint`, else the
// central one.
Edge ground_edge_from(const Config& cfg, const GroundState& gs) {
    if (const auto v = cfg.get("g")) return parse_edge(*v);
    const int x = midpoint_from(cfg, gs.boundary().region(), "midpoint");
    return x < 0 ? central_ground_edge(gs) : gs.canonical_edge(x);
}

} // namespace

ExperimentOutput run_experiment(const std::string& name, const Config& cfg) {
    ExperimentOutput out;
    Config& sum = out.summary;
    sum.set("experiment", name);
    std::ostringstream csv;

    if (name == "fkg-search") {
        const Rational lam = parse_rational(cfg.str("lambda_exact", "1"));
        const auto cat = fkg_catalog(int(cfg.integer("max_instances", 400)));
        const auto w = fkg_search(cat, lam, cfg.integer("cap", 200000));
        sum.set("catalog_size", std::to_string(cat.size()));
        sum.set("lambda", rational_to_string(lam));
        sum.set("found", b01(bool(w)));
        csv << "# schema: fkg_witness v1\n";
        csv << "instance,x,y,lambda,p_x_given_y_ground,p_x_given_y_not,p_x,p_y,states\n";
        if (w) {
            const Region& r = w->bc->region();
            const std::string xs = format_point(r.midpoints()[std::size_t(w->x)]);
            const std::string ys = format_point(r.midpoints()[std::size_t(w->y)]);
            sum.set("instance", w->instance);
            sum.set("x", xs);
            sum.set("y", ys);
            sum.set("p_x_given_y_ground", rational_to_string(w->probs.given_ground));
            sum.set("p_x_given_y_not", rational_to_string(w->probs.given_not));
            sum.set("p_x", rational_to_string(w->probs.marginal));
            sum.set("states", std::to_string(w->states));
            csv << '"' << w->instance << "\",\"" << xs << "\",\"" << ys << "\"," << rational_to_string(lam) << ','
                << rational_to_string(w->probs.given_ground) << ',' << rational_to_string(w->probs.given_not) << ','
                << rational_to_string(w->probs.marginal) << ',' << rational_to_string(w->probs.y_ground) << ','
                << w->states << '\n';
        }
        out.csv = csv.str();
        return out;
    }

    if (name == "coupling") {
        const int n = int(cfg.integer("n", 48)), k = int(cfg.integer("k", 2));
        const int left = int(cfg.integer("left", 4)), w = int(cfg.integer("width", 4)), m = int(cfg.integer("m", 8));
        const WallSetup ws = wall_setup(n, k, left, w, m);
        ExperimentPlan a;
        a.bc = ws.free_bc;
        a.lambda = cfg.num("lambda", 0.5);
        a.seed = cfg.seed("seed", 1);
        a.replicas = int(cfg.integer("replicas", 4));
        a.burn_in = cfg.integer("burn_in", -1);
        a.interval = cfg.integer("interval", -1);
        a.samples = int(cfg.integer("samples", 100));
        a.threads = unsigned(std::max<std::int64_t>(0, cfg.integer("threads", 0)));
        ExperimentPlan b = a;
        if (cfg.integer("identical", 0) == 0) b.bc = ws.wall_bc;
        const CouplingReport rep = coupling_agreement(a, b, ws.window);
        csv << "# schema: coupling_agreement v1\n";
        csv << "n,k,window_left,window_width,m,lambda,agreement,se,samples\n";
        csv << n << ',' << k << ',' << left << ',' << w << ',' << m << ',' << fixed(a.lambda, 6) << ','
            << fixed(rep.agreement.mean) << ',' << fixed(rep.agreement.se) << ',' << rep.samples << '\n';
        sum.set("m", std::to_string(m));
        sum.set("agreement", fixed(rep.agreement.mean));
        sum.set("se", fixed(rep.agreement.se));
        sum.set("wall", to_string(ws.wall));
        out.csv = csv.str();
        return out;
    }

    if (name == "contraction" || name == "hitting") {
        const BoundaryPtr bc = region_from_config(cfg);
        const double lambda = cfg.num("lambda", 0.5);
        std::optional<double> alpha;
        if (cfg.has("alpha")) alpha = cfg.num("alpha", 0.0);
        const LyapunovConfig lc = LyapunovConfig::derive(lambda, alpha, cfg.num("psi0", 50.0));
        const std::uint64_t seed = cfg.seed("seed", 1);
        const unsigned threads = unsigned(std::max<std::int64_t>(0, cfg.integer("threads", 0)));
        sum.set("alpha", fixed(lc.alpha, 12));
        sum.set("C", std::to_string(lc.C));
        sum.set("C_prime", std::to_string(lc.C_prime));
        sum.set("epsilon_formula", fixed(lc.epsilon_formula(), 12));
        if (name == "contraction") {
            const ContractionReport rep = contraction_cases(bc, lc, int(cfg.integer("cases", 1000)), seed, threads);
            out.csv = rep.to_csv();
            sum.set("cases", std::to_string(rep.cases.size()));
            sum.set("negative", std::to_string(rep.negative));
            sum.set("eps_min", fixed(rep.eps_min, 10));
            sum.set("failed_constructions", std::to_string(rep.failed_constructions));
            return out;
        }
        const GroundState gs(bc);
        const Edge g = ground_edge_from(cfg, gs);
        Rng rng(derive_seed(seed, 0xC0FFEE));
        const auto start = reverse_drive_state(gs, g, lc, cfg.num("start_psi", 1.4 * lc.psi0), rng, 10000);
        if (!start) fail(ErrorCode::InvalidArgument, "could not build a start state above start_psi");
        const std::uint64_t max_steps = std::uint64_t(cfg.integer("max_steps", 10000000));
        double eps = cfg.num("eps", -1.0);
        if (eps < 0) {
            const ContractionReport cr = contraction_cases(bc, lc, int(cfg.integer("eps_cases", 50)), seed, threads);
            const double te = trajectory_epsilon(*start, gs, g, lc, int(cfg.integer("pilot_runs", 5)),
                                                 derive_seed(seed, 0x9117), max_steps, threads);
            eps = std::min(cr.eps_min, te);
        }
        const HittingReport rep =
            hitting_time_moment(*start, gs, g, lc, eps, int(cfg.integer("runs", 1000)), seed, max_steps, threads);
        csv << "# schema: hitting_moment v1\n";
        csv << "g,psi_start,eps,runs,censored,mean_T,moment,se\n";
        csv << '"' << to_string(g) << "\"," << fixed(rep.psi_start, 8) << ',' << fixed(eps, 10) << ',' << rep.runs
            << ',' << rep.censored << ',' << fixed(rep.mean_T, 4) << ',' << fixed(rep.moment.mean, 10) << ','
            << fixed(rep.moment.se, 10) << '\n';
        sum.set("eps", fixed(eps, 10));
        sum.set("psi_start", fixed(rep.psi_start, 8));
        sum.set("moment", fixed(rep.moment.mean, 10));
        sum.set("se", fixed(rep.moment.se, 10));
        sum.set("censored", std::to_string(rep.censored));
        sum.set("bound_holds", b01(rep.censored == 0 && rep.moment.mean <= rep.psi_start * (1.0 + 3.0 * rep.moment.se)));
        out.csv = csv.str();
        return out;
    }

    bool known = false;
    for (const std::string& n : experiment_names()) known = known || n == name;
    if (!known) fail(ErrorCode::UnknownExperiment, "unknown experiment '" + name + "'");

    const ExperimentPlan plan = plan_from_config(cfg);
    const Region& r = plan.bc->region();
    sum.set("lambda", fixed(plan.lambda, 6));
    sum.set("burn_in", std::to_string(plan.effective_burn_in()));
    sum.set("interval", std::to_string(plan.effective_interval()));

    if (name == "tail") {
        std::optional<double> alpha;
        if (cfg.has("alpha")) alpha = cfg.num("alpha", 0.0);
        const EdgeTailReport rep = edge_tail(plan, midpoint_from(cfg, r, "midpoint"), alpha);
        out.csv = rep.table.to_csv("edge_tail");
        sum.set("slope", fixed(rep.table.fit.slope));
        sum.set("slope_se", fixed(rep.table.fit.se));
        sum.set("fit_ok", b01(rep.table.fit.ok));
        sum.set("consistency_gate", b01(rep.consistency_gate));
    } else if (name == "crossings") {
        const Rect rect = parse_rect(cfg, r);
        const int L = int(cfg.integer("L", 2));
        const Estimate e = crossing_frequency(plan, rect, L);
        csv << "# schema: crossing_frequency v1\n";
        csv << "x0,y0,x1,y1,L,frequency,se\n";
        csv << rect.x0 << ',' << rect.y0 << ',' << rect.x1 << ',' << rect.y1 << ',' << L << ',' << fixed(e.mean) << ','
            << fixed(e.se) << '\n';
        sum.set("frequency", fixed(e.mean));
        sum.set("se", fixed(e.se));
        out.csv = csv.str();
    } else if (name == "verticals") {
        const Rect rect = parse_rect(cfg, r);
        const VerticalReport rep = vertical_crossings(plan, rect);
        csv << "# schema: unit_vertical_crossings v1\n";
        csv << "columns,samples\n";
        for (std::size_t v = 0; v < rep.histogram.size(); ++v) csv << v << ',' << rep.histogram[v] << '\n';
        sum.set("mean", fixed(rep.mean.mean));
        sum.set("se", fixed(rep.mean.se));
        out.csv = csv.str();
    } else if (name == "ground-frequency") {
        const GroundState gs(plan.bc);
        const Edge g = ground_edge_from(cfg, gs);
        const FrequencyReport rep = ground_state_frequency(plan, g);
        csv << "# schema: ground_frequency v1\n";
        csv << "g,hits,n,frequency,se,wilson_lo,wilson_hi\n";
        csv << '"' << to_string(g) << "\"," << rep.hits << ',' << rep.n << ',' << fixed(rep.est.mean) << ','
            << fixed(rep.est.se) << ',' << fixed(rep.wilson.first) << ',' << fixed(rep.wilson.second) << '\n';
        sum.set("g", to_string(g));
        sum.set("frequency", fixed(rep.est.mean));
        sum.set("se", fixed(rep.est.se));
        out.csv = csv.str();
    } else if (name == "degree") {
        const auto v = cfg.get("vertex");
        const Point p = v ? parse_point(*v)
                          : Point::lattice((r.min_corner().x2 + r.max_corner().x2) / 4, (r.min_corner().y2 + r.max_corner().y2) / 4);
        const TailTable t = degree_tail(plan, p);
        out.csv = t.to_csv("degree_tail");
        sum.set("vertex", format_point(p));
        sum.set("slope", fixed(t.fit.slope));
        sum.set("slope_se", fixed(t.fit.se));
    }
    return out;
}

} // namespace lattri
