#include "lattri/dynamics.hpp"

#include "lattri/error.hpp"

#include <cmath>
#include <string>

namespace lattri {

std::uint64_t splitmix64(std::uint64_t& state) noexcept {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept {
    std::uint64_t s = base;
    const std::uint64_t a = splitmix64(s);
    std::uint64_t t = a ^ (index * 0xD1B54A32D192ED03ULL);
    return splitmix64(t);
}

Rng::Rng(std::uint64_t seed) {
    std::uint64_t s = seed;
    eng_.seed(splitmix64(s));
}

std::uint64_t Rng::below(std::uint64_t n) {
    if (n == 0) fail(ErrorCode::InvalidArgument, "bounded draw from an empty range");
    unsigned __int128 m = (unsigned __int128)next() * n;
    std::uint64_t low = std::uint64_t(m);
    if (low < n) {
        const std::uint64_t threshold = (0 - n) % n;
        while (low < threshold) {
            m = (unsigned __int128)next() * n;
            low = std::uint64_t(m);
        }
    }
    return std::uint64_t(m >> 64);
}

const char* step_action_name(StepAction a) noexcept {
    switch (a) {
    case StepAction::Flipped: return "flipped";
    case StepAction::HeldConstraint: return "held_constraint";
    case StepAction::HeldUnflippable: return "held_unflippable";
    case StepAction::HeldByCoin: return "held_by_coin";
    }
    return "?";
}

namespace {

bool needs_coin(const Triangulation& s, int x) {
    return !s.boundary().is_constraint_midpoint(x) && s.is_flippable(x);
}

} // namespace

StepOutcome heat_bath_update(Triangulation& s, int x, double u, double lambda) {
    StepOutcome out;
    out.midpoint = x;
    out.old_edge = out.new_edge = s.edge(x);
    out.old_len = out.new_len = s.length(x);
    if (s.boundary().is_constraint_midpoint(x)) {
        out.action = StepAction::HeldConstraint;
        return out;
    }
    if (!s.is_flippable(x)) {
        out.action = StepAction::HeldUnflippable;
        return out;
    }
    const Edge cur = s.edge(x);
    const Edge alt = s.flip_target(x);
    const int lc = l1_length(cur), la = l1_length(alt);
    const bool cur_short = lc < la || (lc == la && cur < alt);
    const Edge& shorter = cur_short ? cur : alt;
    const double p_short = flip_probability(std::max(lc, la), std::min(lc, la), lambda);
    const Edge& pick = u < p_short ? shorter : (cur_short ? alt : cur);
    if (pick == cur) {
        out.action = StepAction::HeldByCoin;
        return out;
    }
    s.flip(x);
    out.action = StepAction::Flipped;
    out.new_edge = alt;
    out.new_len = la;
    return out;
}

Chain::Chain(Triangulation initial, double lambda, std::uint64_t seed)
    : sigma_(std::move(initial)), lambda_(lambda), seed_(seed), rng_(seed) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        fail(ErrorCode::InvalidLambda, "lambda must be positive, got " + std::to_string(lambda));
    }
}

StepOutcome Chain::step() {
    const int x = int(rng_.below(std::uint64_t(sigma_.size())));
    const double u = needs_coin(sigma_, x) ? rng_.unit() : 0.0;
    ++steps_;
    return heat_bath_update(sigma_, x, u, lambda_);
}

Chain::RunStats Chain::run(std::uint64_t steps, const std::vector<Observer>& observers) {
    RunStats st;
    for (std::uint64_t i = 0; i < steps; ++i) {
        const StepOutcome o = step();
        ++st.steps;
        switch (o.action) {
        case StepAction::Flipped: ++st.flips; break;
        case StepAction::HeldConstraint: ++st.held_constraint; break;
        case StepAction::HeldUnflippable: ++st.held_unflippable; break;
        case StepAction::HeldByCoin: ++st.held_coin; break;
        }
        for (const Observer& obs : observers) {
            if (obs.every > 0 && steps_ % obs.every == 0) obs.fn(*this, o);
        }
    }
    return st;
}

std::pair<StepOutcome, StepOutcome> coupled_step(Chain& a, Chain& b) {
    if (a.sigma_.region().midpoints() != b.sigma_.region().midpoints()) {
        fail(ErrorCode::MidpointSetMismatch, "coupled chains must share the midpoint set");
    }
    if (a.lambda_ != b.lambda_) fail(ErrorCode::InvalidArgument, "coupled chains must share lambda");
    const int x = int(a.rng_.below(std::uint64_t(a.sigma_.size())));
    const double u = a.rng_.unit();
    ++a.steps_;
    ++b.steps_;
    StepOutcome oa = heat_bath_update(a.sigma_, x, u, a.lambda_);
    StepOutcome ob = heat_bath_update(b.sigma_, x, u, b.lambda_);
    return {oa, ob};
}

std::optional<std::uint64_t> hitting_time(Chain& chain, const GroundState& gs, const Edge& g, double alpha,
                                          double psi0, std::uint64_t max_steps) {
    PsiTracker psi(chain.state(), gs, g, alpha);
    if (psi.value() <= psi0) return 0;
    for (std::uint64_t t = 1; t <= max_steps; ++t) {
        const StepOutcome o = chain.step();
        if (o.action != StepAction::Flipped) continue;
        psi.replace(o.old_edge, o.new_edge);
        if (psi.value() <= psi0) return t;
    }
    return std::nullopt;
}

unsigned default_thread_count() {
    if (const char* env = std::getenv("LATTRI_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return unsigned(v);
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : hc;
}

} // namespace lattri
