#pragma once

#include "lattri/lyapunov.hpp"

#include <cstdint>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <random>
#include <thread>
#include <vector>

namespace lattri {

std::uint64_t splitmix64(std::uint64_t& state) noexcept;
/// Independent stream seed for replica `index` of a run seeded with `base`.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept;

/// mt19937_64 with explicitly specified bounded and unit-interval draws so
/// trajectories do not depend on the standard library's distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed);
    std::uint64_t next() { return eng_(); }
    /// Uniform on [0, n), Lemire's multiply-and-reject.
    std::uint64_t below(std::uint64_t n);
    /// Uniform on [0, 1) with 53 random bits.
    double unit() { return double(next() >> 11) * 0x1.0p-53; }

    const std::mt19937_64& engine() const noexcept { return eng_; }
    std::mt19937_64& engine() noexcept { return eng_; }

private:
    std::mt19937_64 eng_;
};

enum class StepAction { Flipped, HeldConstraint, HeldUnflippable, HeldByCoin };

const char* step_action_name(StepAction a) noexcept;

struct StepOutcome {
    int midpoint = -1;
    StepAction action = StepAction::HeldConstraint;
    int old_len = 0;
    int new_len = 0;
    Edge old_edge{};
    Edge new_edge{};  // equals old_edge unless flipped
};

/// Heat-bath rule at a fixed midpoint with a given uniform. Of the two edges
/// available at x, the shorter (lexicographically smaller on ties) is taken
/// when u < lambda^|short| / (lambda^|short| + lambda^|long|).
StepOutcome heat_bath_update(Triangulation& s, int x, double u, double lambda);

class Chain {
public:
    /// lambda > 0; lambda = 1 gives the uniform chain.
    Chain(Triangulation initial, double lambda, std::uint64_t seed);

    StepOutcome step();
    const Triangulation& state() const noexcept { return sigma_; }
    Triangulation& mutable_state() noexcept { return sigma_; }
    double lambda() const noexcept { return lambda_; }
    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t step_count() const noexcept { return steps_; }
    Rng& rng() noexcept { return rng_; }
    const Rng& rng() const noexcept { return rng_; }

    struct Observer {
        std::uint64_t every = 1;
        std::function<void(const Chain&, const StepOutcome&)> fn;
    };
    struct RunStats {
        std::uint64_t steps = 0;
        std::uint64_t flips = 0;
        std::uint64_t held_constraint = 0;
        std::uint64_t held_unflippable = 0;
        std::uint64_t held_coin = 0;
    };
    RunStats run(std::uint64_t steps, const std::vector<Observer>& observers = {});

    /// Restores step count and generator state (from a checkpoint).
    void restore(std::uint64_t steps, const std::mt19937_64& engine) {
        steps_ = steps;
        rng_.engine() = engine;
    }

private:
    friend std::pair<StepOutcome, StepOutcome> coupled_step(Chain& a, Chain& b);

    Triangulation sigma_;
    double lambda_;
    std::uint64_t seed_;
    std::uint64_t steps_ = 0;
    Rng rng_;
};

/// Grand coupling: one midpoint draw and one uniform, taken from a's
/// generator, applied to both chains. Throws MidpointSetMismatch when the
/// regions differ, InvalidArgument when lambdas differ.
std::pair<StepOutcome, StepOutcome> coupled_step(Chain& a, Chain& b);

/// Steps until Psi_g <= psi0, or nullopt after max_steps.
std::optional<std::uint64_t> hitting_time(Chain& chain, const GroundState& gs, const Edge& g, double alpha,
                                          double psi0, std::uint64_t max_steps);

/// Worker count from LATTRI_THREADS, else hardware concurrency.
unsigned default_thread_count();

/// fn(i) for i in [0, n) on up to `threads` workers; results in index order.
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t n, Fn fn, unsigned threads = 0) {
    if (threads == 0) threads = default_thread_count();
    std::vector<T> out(n);
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
        return out;
    }
    std::vector<std::thread> pool;
    std::exception_ptr err;
    std::mutex err_mu;
    const unsigned k = std::min<unsigned>(threads, unsigned(n));
    for (unsigned w = 0; w < k; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < n; i += k) out[i] = fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mu);
                if (!err) err = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
    return out;
}

} // namespace lattri
