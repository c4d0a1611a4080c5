// Command-line driver. Talks to the library only through lattri.h.

#include "lattri/lattri.h"

#include "CLI11.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace {

struct Failure {
    lt_status status;
    std::string message;
};

void check(lt_status s) {
    if (s != LT_OK) throw Failure{s, lt_last_error()};
}

struct TextDeleter {
    void operator()(lt_text* t) const { lt_text_free(t); }
};
struct ConfigDeleter {
    void operator()(lt_config* c) const { lt_config_free(c); }
};
struct RegionDeleter {
    void operator()(lt_region* r) const { lt_region_free(r); }
};
struct TriDeleter {
    void operator()(lt_triangulation* t) const { lt_triangulation_free(t); }
};
struct ChainDeleter {
    void operator()(lt_chain* c) const { lt_chain_free(c); }
};
struct ManifestDeleter {
    void operator()(lt_manifest* m) const { lt_manifest_free(m); }
};
using Text = std::unique_ptr<lt_text, TextDeleter>;
using ConfigPtr = std::unique_ptr<lt_config, ConfigDeleter>;
using RegionPtr = std::unique_ptr<lt_region, RegionDeleter>;
using TriPtr = std::unique_ptr<lt_triangulation, TriDeleter>;
using ChainPtr = std::unique_ptr<lt_chain, ChainDeleter>;
using ManifestPtr = std::unique_ptr<lt_manifest, ManifestDeleter>;

std::string take(lt_text* t) {
    Text owned(t);
    return std::string(lt_text_data(t), lt_text_size(t));
}

std::string read_text(const std::string& path) {
    lt_text* t = nullptr;
    check(lt_read_file(path.c_str(), &t));
    return take(t);
}

void write_text(const std::string& path, const std::string& data) {
    check(lt_write_file(path.c_str(), data.data(), data.size()));
}

// Options shared by every subcommand: a config file plus overrides. Flags
// applied after the file, so they win.
struct Settings {
    std::string config_file;
    std::vector<std::string> sets;
    std::vector<std::pair<std::string, std::string*>> flags;

    void add(CLI::App* app, const std::string& flag, const std::string& key, std::string* target,
             const std::string& help) {
        app->add_option(flag, *target, help);
        flags.emplace_back(key, target);
    }

    ConfigPtr build() const {
        lt_config* c = nullptr;
        if (!config_file.empty()) {
            check(lt_config_parse(read_text(config_file).c_str(), &c));
        } else {
            check(lt_config_new(&c));
        }
        ConfigPtr cfg(c);
        for (const auto& [key, target] : flags) {
            if (!target->empty()) check(lt_config_set(c, key.c_str(), target->c_str()));
        }
        for (const std::string& kv : sets) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw Failure{LT_PARSE_ERROR, "--set expects key=value, got '" + kv + "'"};
            check(lt_config_set(c, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()));
        }
        return cfg;
    }
};

void common(CLI::App* app, Settings& s) {
    app->add_option("--config", s.config_file, "key = value configuration file");
    app->add_option("--set", s.sets, "override: key=value (repeatable)");
}

std::string get(const lt_config* c, const char* key, const std::string& def = "") {
    const char* v = lt_config_get(c, key);
    return v ? v : def;
}

double number(const lt_config* c, const char* key, double def) {
    const char* v = lt_config_get(c, key);
    if (!v) return def;
    char* end = nullptr;
    const double d = std::strtod(v, &end);
    if (*v == '\0' || *end != '\0' || !std::isfinite(d)) {
        throw Failure{LT_PARSE_ERROR, std::string("field '") + key + "': expected a number (got '" + v + "')"};
    }
    return d;
}

std::uint64_t count(const lt_config* c, const char* key, std::uint64_t def) {
    const double d = number(c, key, double(def));
    if (d < 0 || d != std::floor(d) || d > 1.8e19) {
        throw Failure{LT_PARSE_ERROR, std::string("field '") + key + "': expected a non-negative integer"};
    }
    return std::uint64_t(d);
}

std::uint64_t seed_of(lt_config* c) {
    if (!lt_config_get(c, "seed")) {
        std::random_device rd;
        const std::uint64_t s = (std::uint64_t(rd()) << 32) ^ rd();
        check(lt_config_set(c, "seed", std::to_string(s).c_str()));
        std::cerr << "seed not given; using " << s << "\n";
    }
    const std::string v = get(c, "seed");
    char* end = nullptr;
    const unsigned long long s = std::strtoull(v.c_str(), &end, 10);
    if (v.empty() || v[0] == '-' || *end != '\0') throw Failure{LT_PARSE_ERROR, "field 'seed': expected an unsigned integer"};
    return s;
}

RegionPtr region_of(const lt_config* c) {
    lt_region* r = nullptr;
    check(lt_region_from_config(c, &r));
    return RegionPtr(r);
}

bool parse_edge4(const std::string& s, std::int32_t out[4]) {
    return std::sscanf(s.c_str(), "%d,%d,%d,%d", &out[0], &out[1], &out[2], &out[3]) == 4;
}

std::string fmt(double v, int digits = 12) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

struct Artifacts {
    std::string dir;
    ManifestPtr manifest;

    Artifacts(const std::string& d, const std::string& command, const lt_config* cfg) : dir(d) {
        std::filesystem::create_directories(dir);
        lt_manifest* m = nullptr;
        check(lt_manifest_new(command.c_str(), cfg, &m));
        manifest.reset(m);
    }
    void put(const std::string& name, const std::string& data) {
        write_text(dir + "/" + name, data);
        check(lt_manifest_add_artifact(manifest.get(), name.c_str(), data.data(), data.size()));
    }
    void finish(double wall, double rate) {
        check(lt_manifest_set_timing(manifest.get(), wall, rate));
        lt_text* t = nullptr;
        check(lt_manifest_json(manifest.get(), &t));
        write_text(dir + "/manifest.json", take(t));
    }
};

std::string config_text(const lt_config* c) {
    lt_text* t = nullptr;
    check(lt_config_text(c, &t));
    return take(t);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------- sample

int cmd_sample(lt_config* c) {
    const auto t0 = std::chrono::steady_clock::now();
    const RegionPtr region = region_of(c);
    const double lambda = number(c, "lambda", 1.0);
    const std::uint64_t seed = seed_of(c);
    const std::uint64_t steps = count(c, "steps", 100000);
    lt_region_info info{};
    check(lt_region_info_get(region.get(), &info));
    const std::uint64_t stats_every = count(c, "stats_every", std::uint64_t(info.midpoints));
    const std::uint64_t svg_every = count(c, "svg_every", 0);
    const std::uint64_t ckpt_every = count(c, "checkpoint_every", 0);
    const std::string out = get(c, "out", "sample_out");

    ChainPtr chain;
    {
        lt_chain* ch = nullptr;
        if (const char* resume = lt_config_get(c, "resume")) {
            check(lt_chain_restore(region.get(), read_text(resume).c_str(), &ch));
        } else {
            lt_triangulation* start = nullptr;
            if (const char* st = lt_config_get(c, "start")) {
                check(lt_triangulation_parse(region.get(), read_text(st).c_str(), &start));
            } else {
                check(lt_ground_state(region.get(), &start));
            }
            TriPtr owned(start);
            check(lt_chain_new(start, lambda, seed, &ch));
        }
        chain.reset(ch);
    }

    Artifacts art(out, "sample", c);
    check(lt_manifest_add_seed(art.manifest.get(), seed));
    art.put("config.txt", config_text(c));

    auto snapshot = [&](std::uint64_t step) {
        lt_triangulation* s = nullptr;
        check(lt_chain_state(chain.get(), &s));
        TriPtr owned(s);
        lt_text* svg = nullptr;
        check(lt_render_svg(s, 1, nullptr, &svg));
        art.put("snapshot_" + std::to_string(step) + ".svg", take(svg));
    };
    auto checkpoint = [&](const std::string& name) {
        lt_text* t = nullptr;
        check(lt_chain_checkpoint(chain.get(), &t));
        art.put(name, take(t));
    };

    std::string stats = "# schema: sample_stats v1\nstep,flips,total_length\n";
    std::uint64_t done = 0, flips = 0;
    auto record = [&] {
        lt_triangulation* s = nullptr;
        check(lt_chain_state(chain.get(), &s));
        TriPtr owned(s);
        stats += std::to_string(lt_chain_step_count(chain.get())) + "," + std::to_string(flips) + "," +
                 std::to_string(lt_triangulation_total_length(s)) + "\n";
    };
    record();
    if (svg_every) snapshot(0);
    auto next_multiple = [](std::uint64_t at, std::uint64_t every) { return every ? (at / every + 1) * every : UINT64_MAX; };
    while (done < steps) {
        std::uint64_t stop = std::min({steps, next_multiple(done, stats_every), next_multiple(done, svg_every),
                                       next_multiple(done, ckpt_every)});
        lt_run_stats st{};
        check(lt_chain_run(chain.get(), stop - done, &st));
        flips += st.flips;
        done = stop;
        if (stats_every && done % stats_every == 0) record();
        if (svg_every && done % svg_every == 0) snapshot(done);
        if (ckpt_every && done % ckpt_every == 0) checkpoint("checkpoint_" + std::to_string(done) + ".txt");
    }
    if (!stats_every || done % stats_every != 0) record();
    art.put("stats.csv", stats);
    checkpoint("checkpoint_final.txt");
    {
        lt_triangulation* s = nullptr;
        check(lt_chain_state(chain.get(), &s));
        TriPtr owned(s);
        lt_text* t = nullptr;
        check(lt_triangulation_text(s, &t));
        art.put("final.tri", take(t));
    }
    const double wall = seconds_since(t0);
    art.finish(wall, wall > 0 ? double(steps) / wall : 0.0);
    std::cout << "steps = " << steps << "\nflips = " << flips << "\nout = " << out << "\n";
    return 0;
}

// ---------------------------------------------------------------- enumerate

int cmd_enumerate(lt_config* c) {
    const RegionPtr region = region_of(c);
    const std::int64_t cap = std::int64_t(count(c, "cap", 10000000));
    const char* lambda = lt_config_get(c, "lambda");
    lt_enum_info info{};
    lt_text* z = nullptr;
    const lt_status s = lt_enumerate(region.get(), cap, lambda, &info, lambda ? &z : nullptr);
    if (s == LT_CAP_EXCEEDED) {
        std::cout << "count = cap exceeded\ndetail = " << lt_last_error() << "\n";
        return 3;
    }
    check(s);
    std::cout << "count = " << info.count << "\n";
    std::cout << "free_midpoints = " << info.free_midpoints << "\n";
    if (info.free_midpoints < 63) {
        const std::uint64_t bound = std::uint64_t(1) << info.free_midpoints;
        std::cout << "anclin_bound = " << bound << "\nanclin_margin = " << bound - std::uint64_t(info.count) << "\n";
    }
    std::cout << "max_live_candidates = " << info.max_live << "\ndead_leaves = " << info.dead_leaves << "\n";
    if (z) std::cout << "lambda = " << lambda << "\nZ = " << take(z) << "\n";
    return 0;
}

// ---------------------------------------------------------------- lyapunov

int cmd_lyapunov(lt_config* c) {
    const RegionPtr region = region_of(c);
    const double lambda = number(c, "lambda", 0.5);
    const double psi0 = number(c, "psi0", 50.0);
    std::int32_t g[4];
    const bool have_g = lt_config_get(c, "g") != nullptr;
    if (have_g && !parse_edge4(get(c, "g"), g)) throw Failure{LT_PARSE_ERROR, "field 'g': expected x0,y0,x1,y1"};
    lt_triangulation* s = nullptr;
    if (const char* st = lt_config_get(c, "state")) {
        check(lt_triangulation_parse(region.get(), read_text(st).c_str(), &s));
    } else if (lt_config_get(c, "reverse_drive")) {
        check(lt_reverse_drive(region.get(), have_g ? g : nullptr, lambda, number(c, "reverse_drive", psi0),
                               seed_of(c), &s));
    } else {
        check(lt_ground_state(region.get(), &s));
    }
    TriPtr owned(s);
    lt_drift_info d{};
    lt_text* csv = nullptr;
    check(lt_lyapunov(s, have_g ? g : nullptr, lambda, psi0, &d, &csv));
    const std::string table = take(csv);
    std::cout << "g = " << d.g[0] << "," << d.g[1] << "," << d.g[2] << "," << d.g[3] << "\n";
    std::cout << "psi = " << fmt(d.psi) << "\ndrift_closed_form = " << fmt(d.drift) << "\ndrift_direct = " << fmt(d.direct)
              << "\ndecreasing_set = " << d.dec_count << "\nincreasing_set = " << d.inc_count << "\n";
    std::cout << "verdict = "
              << (d.above_psi0 ? (d.contracting ? "contracting" : "not contracting") : "below psi0, not asserted")
              << "\n";
    if (const char* out = lt_config_get(c, "csv")) {
        write_text(out, table);
    } else {
        std::cout << table;
    }
    return 0;
}

// ---------------------------------------------------------------- experiment / fkg-search

int run_named(const std::string& name, lt_config* c) {
    const auto t0 = std::chrono::steady_clock::now();
    if (name != "fkg-search" && name != "coupling" && !lt_config_get(c, "seed")) seed_of(c);
    lt_text* csv = nullptr;
    lt_text* summary = nullptr;
    check(lt_experiment(name.c_str(), c, &csv, &summary));
    const std::string table = take(csv), sum = take(summary);
    if (const char* out = lt_config_get(c, "out")) {
        Artifacts art(out, "experiment " + name, c);
        if (const char* s = lt_config_get(c, "seed")) check(lt_manifest_add_seed(art.manifest.get(), std::strtoull(s, nullptr, 10)));
        art.put("config.txt", config_text(c));
        art.put(name + ".csv", table);
        art.put("summary.txt", sum);
        art.finish(seconds_since(t0), 0.0);
    } else {
        std::cout << table;
    }
    std::cout << sum;
    return 0;
}

// ---------------------------------------------------------------- render

int cmd_render(lt_config* c) {
    const RegionPtr region = region_of(c);
    lt_triangulation* s = nullptr;
    if (const char* st = lt_config_get(c, "state")) {
        check(lt_triangulation_parse(region.get(), read_text(st).c_str(), &s));
    } else {
        check(lt_ground_state(region.get(), &s));
    }
    TriPtr owned(s);
    std::int32_t g[4];
    const bool have_g = lt_config_get(c, "highlight") != nullptr;
    if (have_g && !parse_edge4(get(c, "highlight"), g)) throw Failure{LT_PARSE_ERROR, "field 'highlight': expected x0,y0,x1,y1"};
    lt_text* svg = nullptr;
    check(lt_render_svg(s, get(c, "classify", "1") != "0", have_g ? g : nullptr, &svg));
    const std::string doc = take(svg);
    if (const char* out = lt_config_get(c, "out")) {
        write_text(out, doc);
    } else {
        std::cout << doc;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lattice triangulations: sampling, enumeration, drift and experiments"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(lt_version()));

    // Region flags and output shared by several subcommands.
    struct Flags {
        std::string region, constraints, lambda, seed, out;
    };

    Settings s_sample, s_enum, s_lyap, s_exp, s_render, s_fkg;
    Flags f_sample, f_enum, f_lyap, f_exp, f_render, f_fkg;
    std::string steps, svg_every, ckpt_every, stats_every, start, resume;
    std::string cap;
    std::string psi0, gflag, state, reverse, csv;
    std::string exp_name;
    std::string rstate, highlight, classify;
    std::string lam_exact, max_inst, fkg_cap;

    auto region_flags = [](CLI::App* a, Settings& s, Flags& f) {
        s.add(a, "--region", "region", &f.region, "square:N, rect:WxH, strip:KxN, JSON, or @file");
        s.add(a, "--constraints", "constraints", &f.constraints, "extra constraint edges x0,y0,x1,y1;...");
    };

    CLI::App* sample = app.add_subcommand("sample", "Run the heat-bath chain and write artifacts");
    common(sample, s_sample);
    region_flags(sample, s_sample, f_sample);
    s_sample.add(sample, "--lambda", "lambda", &f_sample.lambda, "edge weight lambda > 0");
    s_sample.add(sample, "--seed", "seed", &f_sample.seed, "seed (recorded when generated)");
    s_sample.add(sample, "--steps", "steps", &steps, "number of steps, e.g. 1e7");
    s_sample.add(sample, "--stats-every", "stats_every", &stats_every, "steps between statistics rows");
    s_sample.add(sample, "--svg-every", "svg_every", &svg_every, "steps between SVG snapshots (0 = none)");
    s_sample.add(sample, "--checkpoint-every", "checkpoint_every", &ckpt_every, "steps between checkpoints");
    s_sample.add(sample, "--start", "start", &start, "initial triangulation file");
    s_sample.add(sample, "--resume", "resume", &resume, "checkpoint file to continue from");
    s_sample.add(sample, "--out", "out", &f_sample.out, "output directory");

    CLI::App* en = app.add_subcommand("enumerate", "Count all triangulations exactly");
    common(en, s_enum);
    region_flags(en, s_enum, f_enum);
    s_enum.add(en, "--cap", "cap", &cap, "stop after this many states");
    s_enum.add(en, "--lambda", "lambda", &f_enum.lambda, "also report Z(lambda), lambda as p/q or decimal");

    CLI::App* ly = app.add_subcommand("lyapunov", "Drift report for Psi_g");
    common(ly, s_lyap);
    region_flags(ly, s_lyap, f_lyap);
    s_lyap.add(ly, "--lambda", "lambda", &f_lyap.lambda, "0 < lambda < 1");
    s_lyap.add(ly, "--psi0", "psi0", &psi0, "threshold above which contraction is expected");
    s_lyap.add(ly, "--g", "g", &gflag, "ground edge x0,y0,x1,y1");
    s_lyap.add(ly, "--state", "state", &state, "triangulation file (default: ground state)");
    s_lyap.add(ly, "--reverse-drive", "reverse_drive", &reverse, "build a state with Psi_g at least this large");
    s_lyap.add(ly, "--seed", "seed", &f_lyap.seed, "seed for --reverse-drive");
    s_lyap.add(ly, "--csv", "csv", &csv, "write the per-midpoint table here");

    CLI::App* ex = app.add_subcommand("experiment", "Run a named experiment");
    common(ex, s_exp);
    ex->add_option("name", exp_name, std::string("one of: ") + lt_experiment_names())->required();
    region_flags(ex, s_exp, f_exp);
    s_exp.add(ex, "--lambda", "lambda", &f_exp.lambda, "edge weight lambda");
    s_exp.add(ex, "--seed", "seed", &f_exp.seed, "seed");
    s_exp.add(ex, "--out", "out", &f_exp.out, "output directory");

    CLI::App* rd = app.add_subcommand("render", "Render a triangulation as SVG");
    common(rd, s_render);
    region_flags(rd, s_render, f_render);
    s_render.add(rd, "--state", "state", &rstate, "triangulation file (default: ground state)");
    s_render.add(rd, "--highlight", "highlight", &highlight, "ground edge x0,y0,x1,y1 to highlight");
    s_render.add(rd, "--classify", "classify", &classify, "1: colour flippable/constraint edges, 0: plain");
    s_render.add(rd, "--out", "out", &f_render.out, "SVG file (default: stdout)");

    CLI::App* fk = app.add_subcommand("fkg-search", "Search the catalog for an exact FKG violation");
    common(fk, s_fkg);
    s_fkg.add(fk, "--lambda-exact", "lambda_exact", &lam_exact, "lambda as p/q");
    s_fkg.add(fk, "--max-instances", "max_instances", &max_inst, "catalog size");
    s_fkg.add(fk, "--cap", "cap", &fkg_cap, "skip instances with more states");
    s_fkg.add(fk, "--out", "out", &f_fkg.out, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sample->parsed()) return cmd_sample(s_sample.build().get());
        if (en->parsed()) return cmd_enumerate(s_enum.build().get());
        if (ly->parsed()) return cmd_lyapunov(s_lyap.build().get());
        if (ex->parsed()) return run_named(exp_name, s_exp.build().get());
        if (rd->parsed()) return cmd_render(s_render.build().get());
        if (fk->parsed()) return run_named("fkg-search", s_fkg.build().get());
    } catch (const Failure& f) {
        std::cerr << "error: " << lt_status_name(f.status) << ": " << f.message << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
