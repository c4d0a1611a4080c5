#include "lattri/enumeration.hpp"

#include "lattri/edge_poset.hpp"
#include "lattri/error.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <set>

namespace lattri {

using boost::multiprecision::cpp_int;

namespace {

Rational rational_pow(const Rational& base, long e) {
    Rational result = 1;
    Rational b = e < 0 ? Rational(1) / base : base;
    unsigned long n = e < 0 ? (unsigned long)(-e) : (unsigned long)e;
    while (n) {
        if (n & 1) result *= b;
        b *= b;
        n >>= 1;
    }
    return result;
}

cpp_int parse_int(const std::string& s, const std::string& whole) {
    if (s.empty()) fail(ErrorCode::ParseError, "malformed number '" + whole + "'");
    std::size_t i = 0;
    bool neg = false;
    if (s[0] == '-' || s[0] == '+') {
        neg = s[0] == '-';
        i = 1;
    }
    if (i == s.size()) fail(ErrorCode::ParseError, "malformed number '" + whole + "'");
    cpp_int v = 0;
    for (; i < s.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) fail(ErrorCode::ParseError, "malformed number '" + whole + "'");
        v = v * 10 + (s[i] - '0');
    }
    return neg ? cpp_int(-v) : v;
}

} // namespace

Rational parse_rational(const std::string& raw) {
    std::string text;
    for (char c : raw) {
        if (!std::isspace(static_cast<unsigned char>(c))) text.push_back(c);
    }
    if (text.empty()) fail(ErrorCode::ParseError, "empty number");
    const auto slash = text.find('/');
    if (slash != std::string::npos) {
        const cpp_int p = parse_int(text.substr(0, slash), raw);
        const cpp_int q = parse_int(text.substr(slash + 1), raw);
        if (q == 0) fail(ErrorCode::ParseError, "zero denominator in '" + raw + "'");
        return Rational(p, q);
    }
    long exp10 = 0;
    const auto e = text.find_first_of("eE");
    if (e != std::string::npos) {
        exp10 = long(parse_int(text.substr(e + 1), raw));
        text = text.substr(0, e);
    }
    const auto dot = text.find('.');
    std::string digits = text;
    if (dot != std::string::npos) {
        const std::string frac = text.substr(dot + 1);
        digits = text.substr(0, dot) + frac;
        exp10 -= long(frac.size());
        if (digits == "-" || digits == "+" || digits.empty()) fail(ErrorCode::ParseError, "malformed number '" + raw + "'");
    }
    const cpp_int mant = parse_int(digits, raw);
    return Rational(mant) * rational_pow(Rational(10), exp10);
}

std::string rational_to_string(const Rational& q) {
    const cpp_int n = boost::multiprecision::numerator(q);
    const cpp_int d = boost::multiprecision::denominator(q);
    if (d == 1) return n.str();
    return n.str() + "/" + d.str();
}

std::vector<Edge> compatible_edges(const BoundaryCondition& bc, int x) {
    const Region& r = bc.region();
    const Point m = r.midpoints()[std::size_t(x)];
    const int w = (r.max_corner().x2 - r.min_corner().x2) / 2;
    const int h = (r.max_corner().y2 - r.min_corner().y2) / 2;
    std::vector<Edge> out;
    for (int dx = 0; dx <= w; ++dx) {
        for (int dy = -h; dy <= h; ++dy) {
            if (dx == 0 && dy <= 0) continue;
            if (((m.x2 - dx) & 1) || ((m.y2 - dy) & 1)) continue;
            const Edge e = Edge::make(Point{m.x2 - dx, m.y2 - dy}, Point{m.x2 + dx, m.y2 + dy});
            if (bc.is_compatible(e)) out.push_back(e);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<int> anclin_order(const BoundaryCondition& bc) {
    const Region& r = bc.region();
    std::vector<int> out;
    for (int x = 0; x < r.midpoint_count(); ++x) {
        if (!bc.is_constraint_midpoint(x)) out.push_back(x);
    }
    std::sort(out.begin(), out.end(), [&r](int a, int b) {
        const Point p = r.midpoints()[std::size_t(a)], q = r.midpoints()[std::size_t(b)];
        if (p.y2 != q.y2) return p.y2 > q.y2;
        return p.x2 < q.x2;
    });
    return out;
}

Edge EnumeratedSpace::edge(int i, int x) const {
    const int slot = slot_of_[std::size_t(x)];
    if (slot < 0) return *bc_->constraint_at(x);
    return candidates_[std::size_t(slot)][choices_[std::size_t(i)][std::size_t(slot)]];
}

std::vector<Edge> EnumeratedSpace::edges(int i) const {
    std::vector<Edge> out;
    out.reserve(slot_of_.size());
    for (std::size_t x = 0; x < slot_of_.size(); ++x) out.push_back(edge(i, int(x)));
    return out;
}

Triangulation EnumeratedSpace::triangulation(int i) const { return Triangulation::from_edges(bc_, edges(i)); }

int EnumeratedSpace::index_of(const Triangulation& s) const {
    if (s.size() != int(slot_of_.size())) return -1;
    std::vector<std::uint16_t> key(order_.size());
    for (std::size_t k = 0; k < order_.size(); ++k) {
        const auto& cands = candidates_[k];
        const Edge& e = s.edge(order_[k]);
        const auto it = std::lower_bound(cands.begin(), cands.end(), e);
        if (it == cands.end() || *it != e) return -1;
        key[k] = std::uint16_t(it - cands.begin());
    }
    const auto it = index_.find(key);
    return it == index_.end() ? -1 : it->second;
}

EnumeratedSpace enumerate(BoundaryPtr bc, std::int64_t cap, std::optional<std::vector<int>> order,
                          bool validate_leaves) {
    if (!bc) fail(ErrorCode::InvalidArgument, "enumeration needs a boundary condition");
    EnumeratedSpace sp;
    sp.bc_ = bc;
    const Region& r = bc->region();
    const int n = r.midpoint_count();
    sp.order_ = order ? *order : anclin_order(*bc);
    {
        std::vector<int> want = anclin_order(*bc), have = sp.order_;
        std::sort(want.begin(), want.end());
        std::sort(have.begin(), have.end());
        if (want != have) fail(ErrorCode::InvalidArgument, "midpoint order must list every free midpoint once");
    }
    sp.slot_of_.assign(std::size_t(n), -1);
    for (std::size_t k = 0; k < sp.order_.size(); ++k) sp.slot_of_[std::size_t(sp.order_[k])] = int(k);

    const std::size_t slots = sp.order_.size();
    std::vector<int> offset(slots + 1, 0);
    for (std::size_t k = 0; k < slots; ++k) {
        sp.candidates_.push_back(compatible_edges(*bc, sp.order_[k]));
        LATTRI_ENSURE(sp.candidates_.back().size() < 65535, "too many candidates at one midpoint");
        offset[k + 1] = offset[k] + int(sp.candidates_.back().size());
    }
    const int total = offset[slots];
    std::vector<Edge> flat;
    std::vector<int> slot_of_cand;
    flat.reserve(std::size_t(total));
    for (std::size_t k = 0; k < slots; ++k) {
        for (const Edge& e : sp.candidates_[k]) {
            flat.push_back(e);
            slot_of_cand.push_back(int(k));
        }
    }
    // Only conflicts with later slots matter: placing a candidate blocks them.
    std::vector<std::vector<int>> later_conflicts(static_cast<std::size_t>(total));
    for (int i = 0; i < total; ++i) {
        for (int j = offset[std::size_t(slot_of_cand[std::size_t(i)]) + 1]; j < total; ++j) {
            if (open_segments_intersect(flat[std::size_t(i)], flat[std::size_t(j)])) {
                later_conflicts[std::size_t(i)].push_back(j);
            }
        }
    }

    std::int64_t base_len = 0;
    for (const Edge& c : bc->edges()) base_len += l1_length(c);

    std::vector<int> blocked(std::size_t(total), 0);
    std::vector<std::uint16_t> pick(slots, 0);
    std::int64_t found = 0;

    std::function<void(std::size_t, std::int64_t)> dfs = [&](std::size_t k, std::int64_t len) {
        if (k == slots) {
            if (validate_leaves) {
                std::vector<Edge> edges;
                edges.reserve(std::size_t(n));
                for (int x = 0; x < n; ++x) {
                    const int s = sp.slot_of_[std::size_t(x)];
                    edges.push_back(s < 0 ? *bc->constraint_at(x) : sp.candidates_[std::size_t(s)][pick[std::size_t(s)]]);
                }
                try {
                    (void)Triangulation::from_edges(bc, edges);
                } catch (const Error&) {
                    ++sp.dead_leaves_;
                    return;
                }
            }
            if (++found > cap) {
                fail(ErrorCode::CapExceeded,
                     "enumeration exceeded cap " + std::to_string(cap) + " (partial count " + std::to_string(found) + ")");
            }
            sp.index_.emplace(pick, int(sp.choices_.size()));
            sp.choices_.push_back(pick);
            sp.total_len_.push_back(len);
            return;
        }
        int live = 0;
        for (int c = offset[k]; c < offset[k + 1]; ++c) live += blocked[std::size_t(c)] == 0;
        sp.max_live_ = std::max(sp.max_live_, live);
        LATTRI_ENSURE(live <= 2, "more than two live candidates at a midpoint in top-down order");
        for (int c = offset[k]; c < offset[k + 1]; ++c) {
            if (blocked[std::size_t(c)]) continue;
            for (int j : later_conflicts[std::size_t(c)]) ++blocked[std::size_t(j)];
            pick[k] = std::uint16_t(c - offset[k]);
            dfs(k + 1, len + l1_length(flat[std::size_t(c)]));
            for (int j : later_conflicts[std::size_t(c)]) --blocked[std::size_t(j)];
        }
    };
    dfs(0, base_len);
    return sp;
}

std::vector<double> ExactMeasure::as_double() const {
    std::vector<double> out;
    out.reserve(prob.size());
    for (const Rational& p : prob) out.push_back(p.convert_to<double>());
    return out;
}

ExactMeasure exact_measure(const EnumeratedSpace& space, const Rational& lambda) {
    if (lambda <= 0) fail(ErrorCode::InvalidLambda, "lambda must be positive");
    ExactMeasure mu;
    mu.lambda = lambda;
    if (space.size() == 0) return mu;
    std::int64_t lmin = space.total_length(0);
    for (int i = 0; i < space.size(); ++i) lmin = std::min(lmin, space.total_length(i));
    std::map<std::int64_t, std::int64_t> by_len;
    for (int i = 0; i < space.size(); ++i) ++by_len[space.total_length(i) - lmin];
    std::map<std::int64_t, Rational> weight;
    mu.Z = 0;
    for (const auto& [l, count] : by_len) {
        weight[l] = rational_pow(lambda, long(l));
        mu.Z += weight[l] * count;
    }
    // Z is reported in absolute terms, lambda^lmin times the shifted sum.
    std::map<std::int64_t, Rational> p;
    for (const auto& [l, w] : weight) p[l] = w / mu.Z;
    mu.prob.reserve(std::size_t(space.size()));
    for (int i = 0; i < space.size(); ++i) mu.prob.push_back(p[space.total_length(i) - lmin]);
    mu.Z *= rational_pow(lambda, long(lmin));
    return mu;
}

double tv_distance(const std::vector<double>& p, const std::vector<double>& q) {
    if (p.size() != q.size()) fail(ErrorCode::InvalidArgument, "distributions over different index sets");
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
    return 0.5 * s;
}

ConditionalGround conditional_ground_prob(const EnumeratedSpace& space, const ExactMeasure& mu, int x, int y) {
    const BoundaryCondition& bc = *space.boundary_ptr();
    const Edge gx = ground_state_edges(bc, x).front();
    const Edge gy = ground_state_edges(bc, y).front();
    Rational pa = 0, pb = 0, pab = 0;
    for (int i = 0; i < space.size(); ++i) {
        const bool a = space.edge(i, x) == gx;
        const bool b = space.edge(i, y) == gy;
        const Rational& w = mu.prob[std::size_t(i)];
        if (a) pa += w;
        if (b) pb += w;
        if (a && b) pab += w;
    }
    if (pb == 0 || pb == 1) fail(ErrorCode::DegenerateCondition, "conditioning event has probability 0 or 1");
    ConditionalGround c;
    c.given_ground = pab / pb;
    c.given_not = (pa - pab) / (1 - pb);
    c.marginal = pa;
    c.y_ground = pb;
    return c;
}

std::vector<FkgInstance> fkg_catalog(int max_instances) {
    const std::pair<int, int> sizes[] = {{1, 1}, {2, 1}, {3, 1}, {2, 2}, {4, 1}, {3, 2}, {4, 2}, {3, 3}, {4, 3}, {4, 4}};
    std::vector<FkgInstance> out;
    for (const auto& [w, h] : sizes) {
        auto region = std::make_shared<const Region>(Region::rectangle(w, h));
        out.push_back({std::to_string(w) + "x" + std::to_string(h) + " free", BoundaryCondition::make(region)});
        if (int(out.size()) >= max_instances) return out;

        // Interior primitive edges of length 2 or 3 as constraint material.
        std::vector<Edge> pool;
        for (int x = 0; x < region->midpoint_count(); ++x) {
            const auto cands = compatible_edges(*BoundaryCondition::make(region), x);
            for (const Edge& e : cands) {
                const int len = l1_length(e);
                if (len < 2 || len > 3) continue;
                if (region->locate(e.midpoint()) != Region::Location::Inside) continue;
                pool.push_back(e);
            }
        }
        std::sort(pool.begin(), pool.end());
        auto describe = [&](const std::vector<Edge>& cs) {
            std::string s = std::to_string(w) + "x" + std::to_string(h) + " with";
            for (const Edge& e : cs) s += " " + to_string(e);
            return s;
        };
        auto try_add = [&](const std::vector<Edge>& cs) {
            for (std::size_t i = 0; i < cs.size(); ++i) {
                for (std::size_t j = i + 1; j < cs.size(); ++j) {
                    if (open_segments_intersect(cs[i], cs[j]) || cs[i].midpoint() == cs[j].midpoint()) return;
                }
            }
            out.push_back({describe(cs), BoundaryCondition::make(region, cs)});
        };
        for (std::size_t i = 0; i < pool.size() && int(out.size()) < max_instances; ++i) try_add({pool[i]});
        for (std::size_t i = 0; i < pool.size() && int(out.size()) < max_instances; ++i) {
            for (std::size_t j = i + 1; j < pool.size() && int(out.size()) < max_instances; ++j) {
                try_add({pool[i], pool[j]});
            }
        }
        for (std::size_t i = 0; i < pool.size() && int(out.size()) < max_instances; ++i) {
            for (std::size_t j = i + 1; j < pool.size() && int(out.size()) < max_instances; ++j) {
                for (std::size_t k = j + 1; k < pool.size() && int(out.size()) < max_instances; ++k) {
                    try_add({pool[i], pool[j], pool[k]});
                }
            }
        }
        if (int(out.size()) >= max_instances) return out;
    }
    return out;
}

std::optional<FkgWitness> fkg_search(const std::vector<FkgInstance>& catalog, const Rational& lambda,
                                     std::int64_t cap) {
    // Pairs with unique ground edges are tried over the whole catalog first;
    // a tie between unit diagonals makes "ground" depend on the canonical pick.
    for (int pass = 0; pass < 2; ++pass) {
        for (const FkgInstance& inst : catalog) {
            std::optional<EnumeratedSpace> space;
            try {
                space.emplace(enumerate(inst.bc, cap));
            } catch (const Error& e) {
                if (e.code() == ErrorCode::CapExceeded) continue;
                throw;
            }
            if (space->size() < 2) continue;
            const ExactMeasure mu = exact_measure(*space, lambda);
            const std::vector<int>& free = space->order();
            std::vector<int> unique_first, rest;
            for (int x : free) {
                (ground_state_edges(*inst.bc, x).size() == 1 ? unique_first : rest).push_back(x);
            }
            if (pass == 1 && rest.empty()) continue;
            std::vector<int> xs = unique_first;
            if (pass == 1) xs.insert(xs.end(), rest.begin(), rest.end());
            for (int x : xs) {
                for (int y : xs) {
                    if (x == y) continue;
                    if (pass == 1 && ground_state_edges(*inst.bc, x).size() == 1 &&
                        ground_state_edges(*inst.bc, y).size() == 1) {
                        continue;  // already tried
                    }
                    ConditionalGround c;
                    try {
                        c = conditional_ground_prob(*space, mu, x, y);
                    } catch (const Error& e) {
                        if (e.code() == ErrorCode::DegenerateCondition) continue;
                        throw;
                    }
                    if (c.given_not > c.given_ground && c.marginal > c.given_ground) {
                        FkgWitness w;
                        w.instance = inst.name;
                        w.bc = inst.bc;
                        w.x = x;
                        w.y = y;
                        w.lambda = lambda;
                        w.probs = c;
                        w.states = space->size();
                        return w;
                    }
                }
            }
        }
    }
    return std::nullopt;
}

std::optional<std::int64_t> detailed_balance_exact(const EnumeratedSpace& space, const ExactMeasure& mu) {
    const int n = space.boundary_ptr()->region().midpoint_count();
    const Rational inv_n = Rational(1, n);
    auto move_prob = [&](const Triangulation& s, int x) {
        // lambda^new / (lambda^old + lambda^new) = 1 / (1 + lambda^(old - new))
        const int old_len = s.length(x);
        const int new_len = l1_length(s.flip_target(x));
        return inv_n / (1 + rational_pow(mu.lambda, long(old_len - new_len)));
    };
    std::int64_t checked = 0;
    for (int i = 0; i < space.size(); ++i) {
        const Triangulation s = space.triangulation(i);
        Rational out_total = 0;
        for (int x = 0; x < n; ++x) {
            if (s.boundary().is_constraint_midpoint(x) || !s.is_flippable(x)) continue;
            const Triangulation t = s.flipped(x);
            const int j = space.index_of(t);
            if (j < 0) return std::nullopt;
            const Rational p_st = move_prob(s, x);
            const Rational p_ts = move_prob(t, x);
            out_total += p_st;
            if (mu.prob[std::size_t(i)] * p_st != mu.prob[std::size_t(j)] * p_ts) return std::nullopt;
            ++checked;
        }
        if (out_total > 1) return std::nullopt;
    }
    return checked;
}

} // namespace lattri
