#include "ruinlab/markov.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace ruinlab::markov {

namespace {

// Solves A X = B in place by Gaussian elimination with partial pivoting;
// A is n x n, B is n x m, both row-major. Returns false on a vanishing
// pivot. The environment chains here have a handful of states, so a dense
// textbook solve is the right tool.
bool solve_dense(int n, int m, std::vector<double>& a, std::vector<double>& b) {
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        double best = std::abs(a[col * n + col]);
        for (int row = col + 1; row < n; ++row) {
            const double mag = std::abs(a[row * n + col]);
            if (mag > best) {
                best = mag;
                pivot = row;
            }
        }
        if (!(best > 1e-300)) {
            return false;
        }
        if (pivot != col) {
            for (int k = 0; k < n; ++k) {
                std::swap(a[pivot * n + k], a[col * n + k]);
            }
            for (int k = 0; k < m; ++k) {
                std::swap(b[pivot * m + k], b[col * m + k]);
            }
        }
        const double inv = 1.0 / a[col * n + col];
        for (int row = col + 1; row < n; ++row) {
            const double factor = a[row * n + col] * inv;
            if (factor == 0.0) {
                continue;
            }
            for (int k = col; k < n; ++k) {
                a[row * n + k] -= factor * a[col * n + k];
            }
            for (int k = 0; k < m; ++k) {
                b[row * m + k] -= factor * b[col * m + k];
            }
        }
    }
    for (int col = n - 1; col >= 0; --col) {
        const double inv = 1.0 / a[col * n + col];
        for (int k = 0; k < m; ++k) {
            double sum = b[col * m + k];
            for (int j = col + 1; j < n; ++j) {
                sum -= a[col * n + j] * b[j * m + k];
            }
            b[col * m + k] = sum * inv;
        }
    }
    return true;
}

}  // namespace

int EnvironmentPath::state_at(double t) const {
    // states[k] occupies [times[k], times[k+1]); the last state runs to the
    // horizon (and beyond, for callers probing the right endpoint).
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const std::size_t idx = it == times.begin() ? 0 : static_cast<std::size_t>(it - times.begin()) - 1;
    return states[std::min(idx, states.size() - 1)];
}

StationaryLaw stationary_distribution(const model::EnvironmentModel& env) {
    const int n = env.states;
    if (n < 1) {
        throw std::invalid_argument("stationary_distribution: empty chain");
    }
    // pi Q = 0 transposes to Q^T pi^T = 0; the redundant last equation is
    // replaced by the normalization sum pi = 1.
    std::vector<double> a(static_cast<std::size_t>(n) * n);
    std::vector<double> b(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            a[i * n + j] = env.rate(j, i);
        }
    }
    for (int j = 0; j < n; ++j) {
        a[(n - 1) * n + j] = 1.0;
    }
    b[n - 1] = 1.0;
    if (!solve_dense(n, 1, a, b)) {
        throw std::invalid_argument("stationary_distribution: chain is not irreducible");
    }
    for (double p : b) {
        if (!(p > -1e-12)) {
            throw std::invalid_argument("stationary_distribution: chain is not irreducible");
        }
    }
    StationaryLaw law;
    law.pi = std::move(b);
    return law;
}

FundamentalMatrix fundamental_matrix(const model::EnvironmentModel& env) {
    const StationaryLaw law = stationary_distribution(env);
    const int n = env.states;
    std::vector<double> a(static_cast<std::size_t>(n) * n);
    std::vector<double> x(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            a[i * n + j] = law.pi[j] - env.rate(i, j);
        }
        x[i * n + i] = 1.0;
    }
    if (!solve_dense(n, n, a, x)) {
        throw std::invalid_argument("fundamental_matrix: chain is not irreducible");
    }
    FundamentalMatrix u;
    u.states = n;
    u.entries.resize(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            u.entries[i * n + j] = x[i * n + j] - law.pi[j];
        }
    }
    // Defining identities: Q U = U Q = Pi - I and U 1 = 0. A failure here
    // means the solve lost too much precision to trust downstream.
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        double row_sum = 0.0;
        for (int j = 0; j < n; ++j) {
            double qu = 0.0;
            double uq = 0.0;
            for (int k = 0; k < n; ++k) {
                qu += env.rate(i, k) * u.at(k, j);
                uq += u.at(i, k) * env.rate(k, j);
            }
            const double target = law.pi[j] - (i == j ? 1.0 : 0.0);
            worst = std::max(worst, std::abs(qu - target));
            worst = std::max(worst, std::abs(uq - target));
            row_sum += u.at(i, j);
        }
        worst = std::max(worst, std::abs(row_sum));
    }
    if (!(worst <= 1e-10)) {
        throw std::runtime_error("fundamental_matrix: identity check failed");
    }
    return u;
}

double at_most_one_switch_probability(const model::EnvironmentModel& env,
                                      int state, double horizon) {
    if (state < 0 || state >= env.states) {
        throw std::invalid_argument("at_most_one_switch_probability: state out of range");
    }
    if (!(horizon >= 0.0)) {
        throw std::invalid_argument("at_most_one_switch_probability: horizon must be nonnegative");
    }
    if (horizon == 0.0) {
        return 1.0;
    }
    const double qj = env.exit_rate(state);
    double total = std::exp(-qj * horizon);
    for (int k = 0; k < env.states; ++k) {
        if (k == state) {
            continue;
        }
        const double qjk = env.rate(state, k);
        if (qjk == 0.0) {
            continue;
        }
        const double qk = env.exit_rate(k);
        // One switch j -> k at time tau, no further switch from k:
        // integral of qjk e^{-qj tau} e^{-qk (horizon - tau)} over tau.
        if (std::abs(qj - qk) < 1e-9 * std::max({qj, qk, 1.0})) {
            total += qjk * horizon * std::exp(-qj * horizon);
        } else {
            total += qjk / (qj - qk) *
                     (std::exp(-qk * horizon) - std::exp(-qj * horizon));
        }
    }
    return total;
}

EnvironmentPath sample_environment_path(const model::EnvironmentModel& env,
                                        int initial_state, double horizon,
                                        numerics::RngStream& rng) {
    if (initial_state < 0 || initial_state >= env.states) {
        throw std::invalid_argument("sample_environment_path: state out of range");
    }
    if (!(horizon > 0.0)) {
        throw std::invalid_argument("sample_environment_path: horizon must be positive");
    }
    EnvironmentPath path;
    path.horizon = horizon;
    path.times.push_back(0.0);
    path.states.push_back(initial_state);
    double t = 0.0;
    int state = initial_state;
    for (;;) {
        const double exit = env.exit_rate(state);
        if (!(exit > 0.0)) {
            break;  // absorbing state
        }
        t += rng.next_exponential(1.0 / exit);
        if (t >= horizon) {
            break;
        }
        // Embedded jump chain: pick the destination in proportion to its
        // rate. Floating point leftovers fall through to the last
        // reachable destination.
        const double target = rng.next_uniform() * exit;
        double cumulative = 0.0;
        int next = -1;
        for (int k = 0; k < env.states; ++k) {
            if (k == state || env.rate(state, k) == 0.0) {
                continue;
            }
            cumulative += env.rate(state, k);
            next = k;
            if (target <= cumulative) {
                break;
            }
        }
        if (next < 0) {
            break;  // exit rate positive but no destinations listed
        }
        state = next;
        path.times.push_back(t);
        path.states.push_back(state);
    }
    return path;
}

}  // namespace ruinlab::markov
