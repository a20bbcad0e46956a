#pragma once

// Proximal alternating minimization for r-local unlabeled sensing.
//
// Starting from the collapsed initialization, alternate between a blockwise
// permutation update (one exact assignment problem per block on the gain
// Y Yhat^T + lambda P_prev) and a proximally regularized least-squares
// signal update, with lambda shrunk geometrically each round. The recorded
// objective F(X, P) = ||Y - P B X||_F^2 is the unregularized fit; the
// relative-change stopping rule is evaluated on it.

#include "uls/assignment.hpp"
#include "uls/core.hpp"
#include "uls/linalg.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace uls {

struct PamConfig {
    double lambda_init = 100.0;
    double lambda_decay = 10.0;   // divisor applied per iteration
    double lambda_floor = 1e-8;   // guards the stacked solve as lambda -> 0
    double epsilon = 0.01;        // relative objective-change tolerance
    int max_iters = 100;
    std::uint64_t seed = 0;       // echoed into experiment records; the solver itself is deterministic

    void validate() const {
        require(lambda_init > 0.0, "PamConfig: lambda_init must be positive");
        require(lambda_decay > 1.0, "PamConfig: lambda_decay must exceed 1");
        require(lambda_floor >= 0.0, "PamConfig: lambda_floor must be nonnegative");
        require(epsilon > 0.0 && epsilon < 1.0, "PamConfig: epsilon must be in (0, 1)");
        require(max_iters >= 1, "PamConfig: max_iters must be at least 1");
    }
};

enum class StopReason { Tolerance, MaxIters };

struct PamIterationRecord {
    int t = 0;
    double objective = 0.0;   // F after this round's P and X updates
    double lambda = 0.0;      // lambda used in this round
    int p_rows_changed = 0;   // rows whose destination moved vs the previous P
    double delta_p_sq = 0.0;  // ||P_t - P_{t-1}||_F^2 (vs the soft block at t = 1)
    double delta_x_sq = 0.0;  // ||X_t - X_{t-1}||_F^2
};

struct PamResult {
    BlockPermutation P_hat;
    Mat X_hat;
    std::vector<double> objective_trace;  // F_0 (initial fit), F_1, ..., F_T
    std::vector<PamIterationRecord> iteration_records;
    int iterations = 0;
    bool converged = false;
    StopReason stop_reason = StopReason::MaxIters;
    bool init_under_determined = false;
};

/// Mutable loop state of the solver; Y_hat always equals B * X_hat.
struct PamState {
    std::optional<BlockPermutation> P_hat;  // empty until the first P update (soft start)
    Mat X_hat;
    Mat Y_hat;
    int t = 0;
    std::vector<double> objective_trace;
};

/// Raised when the objective stops being finite (pathological inputs).
struct NonFiniteObjectiveError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Individual updates
// ---------------------------------------------------------------------------

struct CollapsedInit {
    Mat X0;
    bool under_determined = false;  // fewer block equations than unknowns
};

/// Initial signal estimate from the block-sum system: summing each block's
/// rows of B and Y cancels any within-block shuffle, leaving the small
/// exact system B_tilde X = Y_tilde.
inline CollapsedInit collapsed_init(const SenseInstance& instance) {
    const auto& partition = instance.partition();
    const int K = partition.block_count();
    Mat B_tilde(K, instance.d());
    Mat Y_tilde(K, instance.m());
    for (int b = 0; b < K; ++b) {
        const int off = partition.offset(b);
        const int r = partition.size(b);
        B_tilde.row(b) = instance.B().middleRows(off, r).colwise().sum();
        Y_tilde.row(b) = instance.Y().middleRows(off, r).colwise().sum();
    }
    CollapsedInit init;
    init.under_determined = K < instance.d();
    init.X0 = solve_ls(B_tilde, Y_tilde);
    return init;
}

/// Blockwise permutation update: for each block, the assignment maximizing
/// <(Y Yhat^T)_bb + lambda (P_prev)_bb, P_b>. The Gram blocks are formed
/// per block in O(r^2 m); the full n x n product never exists. When
/// p_prev is null (the soft doubly stochastic start) the prox term is a
/// constant shift per block and is dropped, which leaves the argmax and the
/// tie-break order unchanged.
inline BlockPermutation p_update(const Mat& Y, const Mat& Y_hat,
                                 const BlockPartition& partition, double lambda,
                                 const BlockPermutation* p_prev) {
    require(Y.rows() == partition.n() && Y_hat.rows() == partition.n(),
            "p_update: Y and Y_hat must have partition.n rows");
    require(Y.cols() == Y_hat.cols(), "p_update: Y and Y_hat must have matching columns");
    require(lambda >= 0.0, "p_update: lambda must be nonnegative");
    if (p_prev != nullptr)
        require(p_prev->partition() == partition, "p_update: previous permutation partition mismatch");

    std::vector<std::vector<int>> blocks;
    blocks.reserve(static_cast<std::size_t>(partition.block_count()));
    for (int b = 0; b < partition.block_count(); ++b) {
        const int off = partition.offset(b);
        const int r = partition.size(b);
        // gain(i, j) = <Y_{off+i}, Yhat_{off+j}>, indexed [destination][source]
        Mat gain = Y.middleRows(off, r) * Y_hat.middleRows(off, r).transpose();
        if (p_prev != nullptr && lambda > 0.0) {
            const auto& sigma_prev = p_prev->assignment(b);
            for (int j = 0; j < r; ++j)
                gain(sigma_prev[static_cast<std::size_t>(j)], j) += lambda;
        }
        const AssignmentResult res = lap_max(gain);
        // res.assignment maps destination -> source; store source -> destination.
        std::vector<int> sigma(static_cast<std::size_t>(r));
        for (int i = 0; i < r; ++i)
            sigma[static_cast<std::size_t>(res.assignment[static_cast<std::size_t>(i)])] = i;
        blocks.push_back(std::move(sigma));
    }
    return BlockPermutation(partition, std::move(blocks));
}

/// Signal update: stacked proximal least squares on the unpermuted
/// measurements P^T Y with anchor X_prev.
inline Mat x_update(const SenseInstance& instance, const BlockPermutation& P, double lambda,
                    const Mat& X_prev) {
    const Mat unpermuted = apply_permutation(invert(P), instance.Y());
    return solve_ls_prox(instance.B(), unpermuted, lambda, X_prev);
}

// ---------------------------------------------------------------------------
// Main loop
// ---------------------------------------------------------------------------

inline double objective_value(const SenseInstance& instance, const BlockPermutation& P,
                              const Mat& BX) {
    return (instance.Y() - apply_permutation(P, BX)).squaredNorm();
}

inline PamResult run_pam(const SenseInstance& instance, const PamConfig& config) {
    config.validate();
    const auto& partition = instance.partition();

    const CollapsedInit init = collapsed_init(instance);
    PamState state;
    state.X_hat = init.X0;
    state.Y_hat = instance.B() * state.X_hat;
    // F_0: fit of the initial prediction before any permutation update.
    state.objective_trace.push_back((instance.Y() - state.Y_hat).squaredNorm());

    std::vector<PamIterationRecord> records;
    double lambda = config.lambda_init;
    bool converged = false;
    StopReason reason = StopReason::MaxIters;

    for (int t = 1; t <= config.max_iters; ++t) {
        const BlockPermutation* prev =
            state.P_hat.has_value() ? &state.P_hat.value() : nullptr;
        BlockPermutation P = p_update(instance.Y(), state.Y_hat, partition, lambda, prev);

        PamIterationRecord rec;
        rec.t = t;
        rec.lambda = lambda;
        if (prev != nullptr) {
            const auto cur_map = P.global_map();
            const auto prev_map = prev->global_map();
            int changed = 0;
            for (std::size_t i = 0; i < cur_map.size(); ++i)
                changed += (cur_map[i] != prev_map[i]) ? 1 : 0;
            rec.p_rows_changed = changed;
            rec.delta_p_sq = 2.0 * changed;
        } else {
            // Distance to the soft start 1_{r x r} / r per block:
            // n - K regardless of which permutation was selected.
            rec.p_rows_changed = -1;
            rec.delta_p_sq = static_cast<double>(partition.n() - partition.block_count());
        }

        Mat X_new = x_update(instance, P, lambda, state.X_hat);
        rec.delta_x_sq = (X_new - state.X_hat).squaredNorm();

        state.P_hat = std::move(P);
        state.X_hat = std::move(X_new);
        state.Y_hat = instance.B() * state.X_hat;
        state.t = t;

        const double F = objective_value(instance, *state.P_hat, state.Y_hat);
        if (!std::isfinite(F))
            throw NonFiniteObjectiveError("run_pam: objective became non-finite at iteration " +
                                          std::to_string(t));
        rec.objective = F;
        records.push_back(rec);

        const double F_prev = state.objective_trace.back();
        state.objective_trace.push_back(F);

        const double rel_change = F_prev > 0.0 ? (F_prev - F) / F_prev : 0.0;
        if (rel_change <= config.epsilon) {
            converged = true;
            reason = StopReason::Tolerance;
            break;
        }
        lambda = std::max(lambda / config.lambda_decay, config.lambda_floor);
    }

    PamResult result{std::move(*state.P_hat), std::move(state.X_hat),
                     std::move(state.objective_trace), std::move(records),
                     state.t, converged, reason, init.under_determined};
    return result;
}

}  // namespace uls
