#include "lattri/lattri.h"

#include "lattri/enumeration.hpp"
#include "lattri/error.hpp"
#include "lattri/io.hpp"

#include <cstring>
#include <new>
#include <string>

using namespace lattri;

struct lt_config {
    Config cfg;
};
struct lt_region {
    BoundaryPtr bc;
};
struct lt_triangulation {
    Triangulation t;
};
struct lt_chain {
    Chain c;
};
struct lt_text {
    std::string s;
};
struct lt_manifest {
    RunManifest m;
};

namespace {

thread_local std::string last_error;

lt_status status_of(ErrorCode c) { return lt_status(int(c) + 1); }

template <class F>
lt_status guard(F&& f) {
    try {
        f();
        last_error.clear();
        return LT_OK;
    } catch (const Error& e) {
        last_error = e.what();
        return status_of(e.code());
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return LT_INTERNAL;
    } catch (const std::exception& e) {
        last_error = e.what();
        return LT_UNKNOWN;
    } catch (...) {
        last_error = "unknown failure";
        return LT_UNKNOWN;
    }
}

void need(const void* p, const char* what) {
    if (!p) fail(ErrorCode::InvalidArgument, std::string(what) + " is NULL");
}

lt_text* text(std::string s) { return new lt_text{std::move(s)}; }

Edge edge_of(const int32_t* xy) { return Edge::lattice(xy[0], xy[1], xy[2], xy[3]); }

void put_edge(const Edge& e, int32_t* xy) {
    xy[0] = e.a.x2 / 2;
    xy[1] = e.a.y2 / 2;
    xy[2] = e.b.x2 / 2;
    xy[3] = e.b.y2 / 2;
}

} // namespace

extern "C" {

const char* lt_version(void) { return "0.1.0"; }

const char* lt_status_name(lt_status s) {
    if (s == LT_OK) return "Ok";
    if (s > LT_OK && s < LT_UNKNOWN) return error_code_name(ErrorCode(int(s) - 1));
    return "Unknown";
}

const char* lt_last_error(void) { return last_error.c_str(); }

const char* lt_text_data(const lt_text* t) { return t ? t->s.c_str() : ""; }
size_t lt_text_size(const lt_text* t) { return t ? t->s.size() : 0; }
void lt_text_free(lt_text* t) { delete t; }

lt_status lt_config_new(lt_config** out) {
    return guard([&] {
        need(out, "out");
        *out = new lt_config{};
    });
}

lt_status lt_config_parse(const char* s, lt_config** out) {
    return guard([&] {
        need(s, "text");
        need(out, "out");
        *out = new lt_config{Config::parse(s)};
    });
}

lt_status lt_config_set(lt_config* c, const char* key, const char* value) {
    return guard([&] {
        need(c, "config");
        need(key, "key");
        need(value, "value");
        c->cfg.set(key, value);
    });
}

const char* lt_config_get(const lt_config* c, const char* key) {
    if (!c || !key) return nullptr;
    const auto& kv = c->cfg.entries();
    const auto it = kv.find(key);
    return it == kv.end() ? nullptr : it->second.c_str();
}

lt_status lt_config_text(const lt_config* c, lt_text** out) {
    return guard([&] {
        need(c, "config");
        need(out, "out");
        *out = text(c->cfg.print());
    });
}

void lt_config_free(lt_config* c) { delete c; }

lt_status lt_region_from_spec(const char* spec, const char* constraints, lt_region** out) {
    return guard([&] {
        need(spec, "spec");
        need(out, "out");
        *out = new lt_region{parse_region(spec, constraints ? parse_edge_list(constraints) : std::vector<Edge>{})};
    });
}

lt_status lt_region_from_config(const lt_config* c, lt_region** out) {
    return guard([&] {
        need(c, "config");
        need(out, "out");
        *out = new lt_region{region_from_config(c->cfg)};
    });
}

lt_status lt_region_info_get(const lt_region* r, lt_region_info* out) {
    return guard([&] {
        need(r, "region");
        need(out, "out");
        const Region& g = r->bc->region();
        out->midpoints = g.midpoint_count();
        out->interior_points = g.interior_lattice_count();
        out->boundary_points = g.boundary_lattice_count();
        out->twice_area = g.twice_area();
        out->constraints = r->bc->constraint_midpoint_count();
        out->convex = g.is_convex();
    });
}

void lt_region_free(lt_region* r) { delete r; }

lt_status lt_ground_state(const lt_region* r, lt_triangulation** out) {
    return guard([&] {
        need(r, "region");
        need(out, "out");
        *out = new lt_triangulation{GroundState(r->bc).triangulation()};
    });
}

lt_status lt_triangulation_parse(const lt_region* r, const char* s, lt_triangulation** out) {
    return guard([&] {
        need(r, "region");
        need(s, "text");
        need(out, "out");
        *out = new lt_triangulation{read_triangulation(r->bc, s)};
    });
}

lt_status lt_triangulation_text(const lt_triangulation* t, lt_text** out) {
    return guard([&] {
        need(t, "triangulation");
        need(out, "out");
        *out = text(write_triangulation(t->t));
    });
}

int32_t lt_triangulation_size(const lt_triangulation* t) { return t ? t->t.size() : 0; }
int64_t lt_triangulation_total_length(const lt_triangulation* t) { return t ? t->t.total_length() : 0; }

lt_status lt_triangulation_edge(const lt_triangulation* t, int32_t i, int32_t xy[4]) {
    return guard([&] {
        need(t, "triangulation");
        need(xy, "xy");
        if (i < 0 || i >= t->t.size()) fail(ErrorCode::InvalidArgument, "edge index out of range");
        put_edge(t->t.edge(i), xy);
    });
}

lt_status lt_triangulation_flip(lt_triangulation* t, int32_t i) {
    return guard([&] {
        need(t, "triangulation");
        if (i < 0 || i >= t->t.size()) fail(ErrorCode::InvalidArgument, "edge index out of range");
        t->t.flip(i);
    });
}

lt_status lt_render_svg(const lt_triangulation* t, int classify, const int32_t* highlight, lt_text** out) {
    return guard([&] {
        need(t, "triangulation");
        need(out, "out");
        SvgStyle st;
        st.classify = classify != 0;
        if (highlight) st.highlight = edge_of(highlight);
        *out = text(render_svg(t->t, st));
    });
}

void lt_triangulation_free(lt_triangulation* t) { delete t; }

lt_status lt_enumerate(const lt_region* r, int64_t cap, const char* lambda, lt_enum_info* out, lt_text** z_out) {
    return guard([&] {
        need(r, "region");
        need(out, "out");
        const EnumeratedSpace sp = enumerate(r->bc, cap);
        out->count = sp.size();
        out->free_midpoints = sp.free_midpoints();
        out->max_live = sp.max_live_candidates();
        out->dead_leaves = sp.dead_leaves();
        if (lambda && z_out) *z_out = text(rational_to_string(exact_measure(sp, parse_rational(lambda)).Z));
    });
}

lt_status lt_chain_new(const lt_triangulation* initial, double lambda, uint64_t seed, lt_chain** out) {
    return guard([&] {
        need(initial, "initial");
        need(out, "out");
        *out = new lt_chain{Chain(initial->t, lambda, seed)};
    });
}

lt_status lt_chain_run(lt_chain* c, uint64_t steps, lt_run_stats* out) {
    return guard([&] {
        need(c, "chain");
        const Chain::RunStats st = c->c.run(steps);
        if (out) *out = lt_run_stats{st.steps, st.flips, st.held_constraint, st.held_unflippable, st.held_coin};
    });
}

uint64_t lt_chain_step_count(const lt_chain* c) { return c ? c->c.step_count() : 0; }

lt_status lt_chain_state(const lt_chain* c, lt_triangulation** out) {
    return guard([&] {
        need(c, "chain");
        need(out, "out");
        *out = new lt_triangulation{c->c.state()};
    });
}

lt_status lt_chain_checkpoint(const lt_chain* c, lt_text** out) {
    return guard([&] {
        need(c, "chain");
        need(out, "out");
        *out = text(Checkpoint::of(c->c).to_text());
    });
}

lt_status lt_chain_restore(const lt_region* r, const char* cp, lt_chain** out) {
    return guard([&] {
        need(r, "region");
        need(cp, "checkpoint");
        need(out, "out");
        *out = new lt_chain{Checkpoint::parse(cp).restore(r->bc)};
    });
}

void lt_chain_free(lt_chain* c) { delete c; }

lt_status lt_lyapunov(const lt_triangulation* t, const int32_t* g, double lambda, double psi0, lt_drift_info* out,
                      lt_text** csv_out) {
    return guard([&] {
        need(t, "triangulation");
        need(out, "out");
        const LyapunovConfig cfg = LyapunovConfig::derive(lambda, std::nullopt, psi0);
        const GroundState gs(t->t.boundary_ptr());
        const Edge ge = g ? edge_of(g) : central_ground_edge(gs);
        const DriftReport rep = expected_drift(t->t, gs, ge, cfg);
        out->psi = rep.psi_value;
        out->drift = rep.total;
        out->direct = direct_drift(t->t, gs, ge, cfg);
        out->dec_count = rep.dec_count;
        out->inc_count = rep.inc_count;
        out->above_psi0 = rep.psi_value >= cfg.psi0;
        out->contracting = out->above_psi0 && rep.total < 0.0;
        put_edge(ge, out->g);
        if (csv_out) *csv_out = text(rep.to_csv());
    });
}

lt_status lt_reverse_drive(const lt_region* r, const int32_t* g, double lambda, double target, uint64_t seed,
                           lt_triangulation** out) {
    return guard([&] {
        need(r, "region");
        need(out, "out");
        const LyapunovConfig cfg = LyapunovConfig::derive(lambda);
        const GroundState gs(r->bc);
        const Edge ge = g ? edge_of(g) : central_ground_edge(gs);
        if (!gs.is_ground(ge)) fail(ErrorCode::NotGroundEdge, to_string(ge) + " is not a ground state edge");
        Rng rng(seed);
        auto s = reverse_drive_state(gs, ge, cfg, target, rng, 10000);
        if (!s) fail(ErrorCode::InvalidArgument, "no forced crossing state reaches the target");
        *out = new lt_triangulation{std::move(*s)};
    });
}

lt_status lt_experiment(const char* name, const lt_config* c, lt_text** csv_out, lt_text** summary_out) {
    return guard([&] {
        need(name, "name");
        need(c, "config");
        ExperimentOutput o = run_experiment(name, c->cfg);
        if (csv_out) *csv_out = text(std::move(o.csv));
        if (summary_out) *summary_out = text(o.summary.print());
    });
}

const char* lt_experiment_names(void) {
    static const std::string names = [] {
        std::string s;
        for (const std::string& n : experiment_names()) s += (s.empty() ? "" : " ") + n;
        return s;
    }();
    return names.c_str();
}

lt_status lt_sha256_hex(const void* data, size_t size, char out[65]) {
    return guard([&] {
        need(out, "out");
        if (size) need(data, "data");
        const std::string h = sha256_hex(std::string(static_cast<const char*>(data ? data : ""), size));
        std::memcpy(out, h.c_str(), 65);
    });
}

lt_status lt_manifest_new(const char* command, const lt_config* c, lt_manifest** out) {
    return guard([&] {
        need(command, "command");
        need(out, "out");
        auto* m = new lt_manifest{};
        m->m.command = command;
        if (c) m->m.config = c->cfg;
        *out = m;
    });
}

lt_status lt_manifest_add_seed(lt_manifest* m, uint64_t seed) {
    return guard([&] {
        need(m, "manifest");
        m->m.seeds.push_back(seed);
    });
}

lt_status lt_manifest_add_artifact(lt_manifest* m, const char* path, const void* data, size_t size) {
    return guard([&] {
        need(m, "manifest");
        need(path, "path");
        if (size) need(data, "data");
        m->m.add_artifact(path, std::string(static_cast<const char*>(data ? data : ""), size));
    });
}

lt_status lt_manifest_set_timing(lt_manifest* m, double wall_seconds, double steps_per_second) {
    return guard([&] {
        need(m, "manifest");
        m->m.wall_seconds = wall_seconds;
        m->m.steps_per_second = steps_per_second;
    });
}

lt_status lt_manifest_json(const lt_manifest* m, lt_text** out) {
    return guard([&] {
        need(m, "manifest");
        need(out, "out");
        *out = text(m->m.to_json());
    });
}

void lt_manifest_free(lt_manifest* m) { delete m; }

lt_status lt_read_file(const char* path, lt_text** out) {
    return guard([&] {
        need(path, "path");
        need(out, "out");
        *out = text(read_file(path));
    });
}

lt_status lt_write_file(const char* path, const void* data, size_t size) {
    return guard([&] {
        need(path, "path");
        if (size) need(data, "data");
        write_file(path, std::string(static_cast<const char*>(data ? data : ""), size));
    });
}

} // extern "C"
