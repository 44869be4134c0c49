#include "qmediate/mediation.hpp"

#include "qmediate/errors.hpp"
#include "qmediate/rng.hpp"
#include "qmediate/stats.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iostream>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace qmediate {

const char* mediator_name(int k) {
    switch (k) {
    case 0: return "S_A";
    case 1: return "gamma_A";
    case 2: return "L_A";
    case 3: return "I_AB";
    default: throw std::out_of_range("mediator index out of range");
    }
}

double mediator_component(const MediatorVector& m, int k) {
    switch (k) {
    case 0: return m.s_a;
    case 1: return m.gamma_a;
    case 2: return m.l_a;
    case 3: return m.i_ab;
    default: throw std::out_of_range("mediator index out of range");
    }
}

std::string to_string(BasisMode mode) {
    return mode == BasisMode::Reduced ? "reduced" : "full-pseudo";
}

BasisMode basis_mode_from_string(const std::string& name) {
    if (name == "reduced") {
        return BasisMode::Reduced;
    }
    if (name == "full-pseudo" || name == "full") {
        return BasisMode::FullPseudo;
    }
    throw ConfigError("unknown basis mode '" + name + "' (expected reduced|full-pseudo)");
}

std::array<double, kMediatorCount> estimate_alpha(const std::vector<PairedObservation>& pairs) {
    if (pairs.empty()) {
        throw std::invalid_argument("estimate_alpha: no paired observations");
    }
    std::array<double, kMediatorCount> alpha{};
    for (const PairedObservation& obs : pairs) {
        for (int k = 0; k < kMediatorCount; ++k) {
            alpha[static_cast<std::size_t>(k)] +=
                mediator_component(obs.m1, k) - mediator_component(obs.m0, k);
        }
    }
    for (double& a : alpha) {
        a /= static_cast<double>(pairs.size());
    }
    return alpha;
}

namespace {

// Near-constant mediator columns carry no signal and make the design
// singular (pairwise-topology runs produce exactly constant mediators), so
// they are excluded up front.
constexpr double kConstantSd = 1e-9;

std::vector<double> mediator_column(const std::vector<PairedObservation>& pairs, int k) {
    std::vector<double> col;
    col.reserve(2 * pairs.size());
    for (const PairedObservation& obs : pairs) {
        col.push_back(mediator_component(obs.m0, k));
        col.push_back(mediator_component(obs.m1, k));
    }
    return col;
}

std::vector<double> outcome_column(const std::vector<PairedObservation>& pairs) {
    std::vector<double> y;
    y.reserve(2 * pairs.size());
    for (const PairedObservation& obs : pairs) {
        y.push_back(obs.y0);
        y.push_back(obs.y1);
    }
    return y;
}

Matrix build_design(const std::vector<PairedObservation>& pairs,
                    const std::vector<int>& mediators, bool with_interactions) {
    const std::size_t n_rows = 2 * pairs.size();
    const std::size_t base = 2 + mediators.size();
    const std::size_t cols = with_interactions ? base + mediators.size() : base;
    Matrix x(n_rows, cols);
    for (std::size_t s = 0; s < pairs.size(); ++s) {
        for (int t = 0; t < 2; ++t) {
            const std::size_t row = 2 * s + static_cast<std::size_t>(t);
            const MediatorVector& m = t == 0 ? pairs[s].m0 : pairs[s].m1;
            x.at(row, 0) = 1.0;
            x.at(row, 1) = static_cast<double>(t);
            for (std::size_t j = 0; j < mediators.size(); ++j) {
                const double value = mediator_component(m, mediators[j]);
                x.at(row, 2 + j) = value;
                if (with_interactions) {
                    x.at(row, base + j) = static_cast<double>(t) * value;
                }
            }
        }
    }
    return x;
}

struct OlsSolution {
    std::vector<double> coef;
    std::vector<double> fitted;
    std::vector<double> residuals;
    double rss = 0.0;
    bool singular = false;
    std::size_t deficient_column = 0;
};

// Pivoted normal-equation solve; flags the deficient design column instead
// of solving through it.
OlsSolution try_ols(const Matrix& x, const std::vector<double>& y) {
    Matrix xtx(x.cols(), x.cols());
    std::vector<double> xty(x.cols(), 0.0);
    for (std::size_t r = 0; r < x.rows(); ++r) {
        for (std::size_t i = 0; i < x.cols(); ++i) {
            const double xi = x.at(r, i);
            if (xi == 0.0) {
                continue;
            }
            xty[i] += xi * y[r];
            for (std::size_t j = i; j < x.cols(); ++j) {
                xtx.at(i, j) += xi * x.at(r, j);
            }
        }
    }
    for (std::size_t i = 0; i < x.cols(); ++i) {
        for (std::size_t j = i + 1; j < x.cols(); ++j) {
            xtx.at(j, i) = xtx.at(i, j);
        }
    }
    const LinearSolve solve = solve_pivoted(std::move(xtx), std::move(xty), 1e-10);
    OlsSolution out;
    if (solve.singular) {
        out.singular = true;
        out.deficient_column = solve.deficient_column;
        return out;
    }
    out.coef = solve.x;
    out.fitted = matvec(x, out.coef);
    out.residuals.resize(y.size());
    for (std::size_t r = 0; r < y.size(); ++r) {
        out.residuals[r] = y[r] - out.fitted[r];
        out.rss += out.residuals[r] * out.residuals[r];
    }
    return out;
}

OlsSolution ols_or_throw(const Matrix& x, const std::vector<double>& y,
                         const std::function<std::string(std::size_t)>& column_name) {
    OlsSolution out = try_ols(x, y);
    if (out.singular) {
        throw SingularDesignError("design is rank deficient at column '" +
                                  column_name(out.deficient_column) + "'");
    }
    return out;
}

std::string reduced_column_name(const std::vector<int>& mediators, std::size_t col) {
    if (col == 0) {
        return "intercept";
    }
    if (col == 1) {
        return "t";
    }
    return mediator_name(mediators[col - 2]);
}

/// Mediator indices that actually vary, in canonical order; `candidates`
/// narrows the set (reduced basis uses S_A and gamma_A only).
std::vector<int> varying_mediators(const std::vector<PairedObservation>& pairs,
                                   const std::vector<int>& candidates,
                                   std::vector<int>* dropped) {
    std::vector<int> kept;
    for (const int k : candidates) {
        const std::vector<double> col = mediator_column(pairs, k);
        const bool varies = pairs.size() >= 1 && col.size() >= 2 && sample_sd(col) > kConstantSd;
        if (varies) {
            kept.push_back(k);
        } else if (dropped != nullptr) {
            dropped->push_back(k);
        }
    }
    return kept;
}

} // namespace

OutcomeFit fit_outcome_model(const std::vector<PairedObservation>& pairs, BasisMode basis) {
    if (pairs.size() < 2) {
        throw std::invalid_argument("fit_outcome_model: need at least 2 paired observations");
    }
    OutcomeFit fit;
    fit.basis = basis;

    const std::vector<int> candidates =
        basis == BasisMode::Reduced ? std::vector<int>{0, 1} : std::vector<int>{0, 1, 2, 3};
    std::vector<int> mediators = varying_mediators(pairs, candidates, &fit.dropped_mediators);
    const std::vector<double> y = outcome_column(pairs);

    if (basis == BasisMode::Reduced) {
        // Retry with further drops while the pivoting flags a mediator
        // column as collinear; intercept/t deficiencies are fatal.
        while (true) {
            Matrix x = build_design(pairs, mediators, false);
            const OlsSolution sol = try_ols(x, y);
            if (sol.singular) {
                if (sol.deficient_column < 2) {
                    throw SingularDesignError(
                        "design is rank deficient at column '" +
                        reduced_column_name(mediators, sol.deficient_column) + "'");
                }
                const std::size_t which = sol.deficient_column - 2;
                fit.dropped_mediators.push_back(mediators[which]);
                mediators.erase(mediators.begin() + static_cast<std::ptrdiff_t>(which));
                continue;
            }
            fit.design = std::move(x);
            fit.tau0 = sol.coef[0];
            fit.tau = sol.coef[1];
            for (std::size_t j = 0; j < mediators.size(); ++j) {
                fit.beta[static_cast<std::size_t>(mediators[j])] = sol.coef[2 + j];
            }
            fit.mediator_columns = mediators;
            fit.residuals = sol.residuals;
            fit.fitted = sol.fitted;
            return fit;
        }
    }

    // Full basis: rank deficiency is expected (pure states pin I = 2 S_A and
    // L = 1 - gamma_A), so take the minimum-norm pseudo-solution of the
    // normal equations.
    Matrix x = build_design(pairs, mediators, false);
    Matrix xtx(x.cols(), x.cols());
    std::vector<double> xty(x.cols(), 0.0);
    for (std::size_t r = 0; r < x.rows(); ++r) {
        for (std::size_t i = 0; i < x.cols(); ++i) {
            xty[i] += x.at(r, i) * y[r];
            for (std::size_t j = 0; j < x.cols(); ++j) {
                xtx.at(i, j) += x.at(r, i) * x.at(r, j);
            }
        }
    }
    const std::vector<double> coef = solve_min_norm(xtx, xty);
    fit.design = std::move(x);
    fit.tau0 = coef[0];
    fit.tau = coef[1];
    for (std::size_t j = 0; j < mediators.size(); ++j) {
        fit.beta[static_cast<std::size_t>(mediators[j])] = coef[2 + j];
    }
    fit.mediator_columns = mediators;
    fit.fitted = matvec(fit.design, coef);
    fit.residuals.resize(y.size());
    for (std::size_t r = 0; r < y.size(); ++r) {
        fit.residuals[r] = y[r] - fit.fitted[r];
    }
    return fit;
}

SemEstimate decompose(const std::vector<PairedObservation>& pairs, BasisMode basis) {
    SemEstimate est;
    est.alpha = estimate_alpha(pairs);
    const OutcomeFit fit = fit_outcome_model(pairs, basis);
    est.tau0 = fit.tau0;
    est.tau = fit.tau;
    est.beta = fit.beta;
    est.basis = basis;
    est.dropped_mediators = fit.dropped_mediators;

    double ate = 0.0;
    for (const PairedObservation& obs : pairs) {
        ate += obs.y1 - obs.y0;
    }
    est.ate_empirical = ate / static_cast<double>(pairs.size());
    est.nde = est.tau;
    est.nie = 0.0;
    for (int k = 0; k < kMediatorCount; ++k) {
        est.per_mediator[static_cast<std::size_t>(k)] =
            est.alpha[static_cast<std::size_t>(k)] * est.beta[static_cast<std::size_t>(k)];
        est.nie += est.per_mediator[static_cast<std::size_t>(k)];
    }
    est.eps_rel = consistency_error(est);
    return est;
}

double consistency_error(const SemEstimate& est) {
    return std::abs(est.ate_empirical - (est.tau + est.nie)) /
           (std::abs(est.ate_empirical) + 1e-12);
}

ClusterRobust cluster_robust_variance(const Matrix& design, const std::vector<double>& residuals,
                                      const std::vector<std::size_t>& cluster_of_row) {
    if (design.rows() != residuals.size() || design.rows() != cluster_of_row.size()) {
        throw std::invalid_argument("cluster_robust_variance: row count mismatch");
    }
    const std::size_t p = design.cols();
    Matrix xtx(p, p);
    for (std::size_t r = 0; r < design.rows(); ++r) {
        for (std::size_t i = 0; i < p; ++i) {
            for (std::size_t j = 0; j < p; ++j) {
                xtx.at(i, j) += design.at(r, i) * design.at(r, j);
            }
        }
    }
    const Matrix bread = invert(std::move(xtx));

    // meat = sum_s (X_s' u_s)(X_s' u_s)'
    std::size_t n_clusters = 0;
    for (const std::size_t c : cluster_of_row) {
        n_clusters = std::max(n_clusters, c + 1);
    }
    Matrix meat(p, p);
    std::vector<std::vector<double>> scores(n_clusters, std::vector<double>(p, 0.0));
    for (std::size_t r = 0; r < design.rows(); ++r) {
        for (std::size_t i = 0; i < p; ++i) {
            scores[cluster_of_row[r]][i] += design.at(r, i) * residuals[r];
        }
    }
    for (const auto& score : scores) {
        for (std::size_t i = 0; i < p; ++i) {
            for (std::size_t j = 0; j < p; ++j) {
                meat.at(i, j) += score[i] * score[j];
            }
        }
    }

    ClusterRobust out;
    out.covariance = matmul(matmul(bread, meat), bread);
    // Symmetrize away the last-bit drift of the triple product.
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = i + 1; j < p; ++j) {
            const double v = 0.5 * (out.covariance.at(i, j) + out.covariance.at(j, i));
            out.covariance.at(i, j) = v;
            out.covariance.at(j, i) = v;
        }
    }
    out.se.resize(p);
    for (std::size_t i = 0; i < p; ++i) {
        out.se[i] = std::sqrt(std::max(out.covariance.at(i, i), 0.0));
    }
    return out;
}

ClusterRobust cluster_robust_for_fit(const OutcomeFit& fit, std::size_t n_pairs) {
    std::vector<std::size_t> clusters(2 * n_pairs);
    for (std::size_t s = 0; s < n_pairs; ++s) {
        clusters[2 * s] = s;
        clusters[2 * s + 1] = s;
    }
    return cluster_robust_variance(fit.design, fit.residuals, clusters);
}

std::vector<PairedObservation> resample_pairs(const std::vector<PairedObservation>& pairs,
                                              std::uint64_t replicate_seed) {
    Rng rng(replicate_seed);
    std::vector<PairedObservation> resampled;
    resampled.reserve(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        // Complete pairs are drawn, never single arms.
        resampled.push_back(pairs[rng.uniform_below(pairs.size())]);
    }
    return resampled;
}

BootstrapResult bootstrap_indirect(const std::vector<PairedObservation>& pairs, int b_resamples,
                                   std::uint64_t seed, BasisMode basis, int jobs) {
    if (pairs.size() < 10) {
        throw std::invalid_argument("bootstrap_indirect: need at least 10 pairs");
    }
    if (b_resamples < 1) {
        throw std::invalid_argument("bootstrap_indirect: B must be positive");
    }

    const auto count = static_cast<std::size_t>(b_resamples);
    std::vector<std::array<double, kMediatorCount>> products(count);
    std::vector<double> totals(count, 0.0);
    std::vector<char> ok(count, 0);

    auto run_replicate = [&](std::size_t b) {
        const std::uint64_t rep_seed = derive_seed(seed, RngStream::Bootstrap, b);
        const std::vector<PairedObservation> resampled = resample_pairs(pairs, rep_seed);
        try {
            const std::array<double, kMediatorCount> alpha = estimate_alpha(resampled);
            const OutcomeFit fit = fit_outcome_model(resampled, basis);
            double total = 0.0;
            for (int k = 0; k < kMediatorCount; ++k) {
                const double prod = alpha[static_cast<std::size_t>(k)] *
                                    fit.beta[static_cast<std::size_t>(k)];
                products[b][static_cast<std::size_t>(k)] = prod;
                total += prod;
            }
            totals[b] = total;
            ok[b] = 1;
        } catch (const SingularDesignError&) {
            ok[b] = 0; // counted, resample skipped
        }
    };

    if (jobs <= 1) {
        for (std::size_t b = 0; b < count; ++b) {
            run_replicate(b);
        }
    } else {
        const auto workers = static_cast<std::size_t>(jobs);
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w]() {
                for (std::size_t b = w; b < count; b += workers) {
                    run_replicate(b);
                }
            });
        }
        for (auto& t : pool) {
            t.join();
        }
    }

    BootstrapResult out;
    out.b_requested = b_resamples;
    for (int k = 0; k < kMediatorCount; ++k) {
        std::vector<double> values;
        values.reserve(count);
        for (std::size_t b = 0; b < count; ++b) {
            if (ok[b]) {
                values.push_back(products[b][static_cast<std::size_t>(k)]);
            }
        }
        if (k == 0) {
            out.b_used = static_cast<int>(values.size());
            out.skipped = b_resamples - out.b_used;
        }
        if (values.empty()) {
            throw SingularDesignError("bootstrap_indirect: every resample was singular");
        }
        std::sort(values.begin(), values.end());
        out.ci_per_mediator[static_cast<std::size_t>(k)] = {quantile_sorted(values, 0.025),
                                                            quantile_sorted(values, 0.975)};
    }
    std::vector<double> total_values;
    total_values.reserve(count);
    for (std::size_t b = 0; b < count; ++b) {
        if (ok[b]) {
            total_values.push_back(totals[b]);
        }
    }
    std::sort(total_values.begin(), total_values.end());
    out.ci_total = {quantile_sorted(total_values, 0.025), quantile_sorted(total_values, 0.975)};

    out.skip_warning = out.skipped * 20 > b_resamples; // above 5%
    if (out.skip_warning) {
        std::cerr << "warning: " << out.skipped << "/" << b_resamples
                  << " bootstrap resamples were singular and skipped\n";
    }
    return out;
}

InteractionTest test_interaction(const std::vector<PairedObservation>& pairs) {
    InteractionTest out;
    std::vector<int> dropped;
    const std::vector<int> mediators = varying_mediators(pairs, {0, 1}, &dropped);
    if (mediators.empty() || pairs.size() < 4) {
        out.code = InteractionCode::Untestable;
        return out;
    }
    const std::vector<double> y = outcome_column(pairs);
    const Matrix x_restricted = build_design(pairs, mediators, false);
    const Matrix x_augmented = build_design(pairs, mediators, true);

    try {
        const OlsSolution restricted = ols_or_throw(x_restricted, y, [&](std::size_t col) {
            return reduced_column_name(mediators, col);
        });
        const OlsSolution augmented = ols_or_throw(x_augmented, y, [&](std::size_t col) {
            if (col < 2 + mediators.size()) {
                return reduced_column_name(mediators, col);
            }
            return std::string("t*") + mediator_name(mediators[col - 2 - mediators.size()]);
        });

        const double q = static_cast<double>(mediators.size());
        const double dof =
            static_cast<double>(x_augmented.rows()) - static_cast<double>(x_augmented.cols());
        if (dof < 1.0 || augmented.rss <= 0.0) {
            out.code = InteractionCode::Untestable;
            return out;
        }
        out.statistic = ((restricted.rss - augmented.rss) / q) / (augmented.rss / dof);
        out.p_value = f_survival(out.statistic, q, dof);

        // Classical per-term t tests on the interaction block.
        Matrix xtx(x_augmented.cols(), x_augmented.cols());
        for (std::size_t r = 0; r < x_augmented.rows(); ++r) {
            for (std::size_t i = 0; i < x_augmented.cols(); ++i) {
                for (std::size_t j = 0; j < x_augmented.cols(); ++j) {
                    xtx.at(i, j) += x_augmented.at(r, i) * x_augmented.at(r, j);
                }
            }
        }
        const Matrix xtx_inv = invert(std::move(xtx));
        const double sigma2 = augmented.rss / dof;
        bool any_term_fails = false;
        for (std::size_t j = 0; j < mediators.size(); ++j) {
            const std::size_t col = 2 + mediators.size() + j;
            const double se = std::sqrt(std::max(sigma2 * xtx_inv.at(col, col), 0.0));
            double p_term = 1.0;
            if (se > 0.0) {
                p_term = t_two_sided_p(augmented.coef[col] / se, dof);
            }
            out.term_p.emplace_back(mediators[j], p_term);
            any_term_fails = any_term_fails || p_term < 0.05;
        }

        if (out.p_value < 0.05) {
            out.code = InteractionCode::Fail;
        } else if (any_term_fails) {
            out.code = InteractionCode::Partial;
        } else {
            out.code = InteractionCode::Pass;
        }
    } catch (const SingularDesignError&) {
        out.code = InteractionCode::Untestable;
    }
    return out;
}

std::string to_string(InteractionCode code) {
    switch (code) {
    case InteractionCode::Pass: return "pass";
    case InteractionCode::Partial: return "partial";
    case InteractionCode::Fail: return "fail";
    case InteractionCode::Untestable: return "untestable";
    }
    return "?";
}

std::array<double, kMediatorCount> mamc(const SemEstimate& est) {
    std::array<double, kMediatorCount> out{};
    for (int k = 0; k < kMediatorCount; ++k) {
        out[static_cast<std::size_t>(k)] = std::abs(est.per_mediator[static_cast<std::size_t>(k)]);
    }
    return out;
}

RqcResult rqc(const std::array<double, kMediatorCount>& mamc_values) {
    RqcResult out;
    double total = 0.0;
    for (const double v : mamc_values) {
        total += v;
    }
    if (total <= 0.0) {
        out.defined = false;
        return out;
    }
    out.defined = true;
    for (int k = 0; k < kMediatorCount; ++k) {
        out.pct[static_cast<std::size_t>(k)] =
            mamc_values[static_cast<std::size_t>(k)] / total * 100.0;
    }
    return out;
}

double intra_threshold(const std::vector<PairedObservation>& pairs, double c) {
    if (pairs.size() < 2) {
        throw std::invalid_argument("intra_threshold: need at least 2 pairs");
    }
    std::vector<double> deltas;
    deltas.reserve(pairs.size());
    for (const PairedObservation& obs : pairs) {
        deltas.push_back(obs.y1 - obs.y0);
    }
    return c * sample_sd(deltas);
}

std::string to_string(Regime r) {
    switch (r) {
    case Regime::QuantumAdvantage: return "quantum-advantage";
    case Regime::MaskedQuantum: return "masked-quantum";
    case Regime::DoubleDetrimental: return "double-detrimental";
    case Regime::ClassicalDominated: return "classical-dominated";
    case Regime::Neutral: return "neutral";
    case Regime::Compensatory: return "compensatory";
    case Regime::ClassicalScalable: return "classical-scalable";
    case Regime::QuantumIdle: return "quantum-idle";
    case Regime::ArchitectureDeleterious: return "architecture-deleterious";
    case Regime::Unclassified: return "unclassified";
    }
    return "?";
}

Regime regime_from_string(const std::string& name) {
    for (const Regime r :
         {Regime::QuantumAdvantage, Regime::MaskedQuantum, Regime::DoubleDetrimental,
          Regime::ClassicalDominated, Regime::Neutral, Regime::Compensatory,
          Regime::ClassicalScalable, Regime::QuantumIdle, Regime::ArchitectureDeleterious,
          Regime::Unclassified}) {
        if (to_string(r) == name) {
            return r;
        }
    }
    throw ConfigError("unknown regime '" + name + "'");
}

RegimeLabel classify_regime(double tau, double nie, double ate, double epsilon) {
    if (!(epsilon >= 0.0) || !std::isfinite(tau) || !std::isfinite(nie) || !std::isfinite(ate)) {
        throw std::invalid_argument("classify_regime: inputs must be finite, epsilon >= 0");
    }
    // "about zero" is the closed band [-epsilon, +epsilon].
    const auto thresholded_sign = [epsilon](double v) {
        if (v > epsilon) {
            return 1;
        }
        if (v < -epsilon) {
            return -1;
        }
        return 0;
    };

    RegimeLabel label;
    label.sign_tau = thresholded_sign(tau);
    label.sign_indirect = thresholded_sign(nie);
    label.sign_total = thresholded_sign(ate);

    const int st = label.sign_tau;
    const int si = label.sign_indirect;
    const int stot = label.sign_total;

    if (st == 1 && si == 1 && stot == 1) {
        label.regime = Regime::QuantumAdvantage;
    } else if (st == -1 && si == 1 && stot == -1) {
        label.regime = Regime::MaskedQuantum;
    } else if (st == -1 && si == -1 && stot == -1) {
        label.regime = Regime::DoubleDetrimental;
    } else if (st == 1 && si == -1 && stot == 1) {
        label.regime = Regime::ClassicalDominated;
    } else if (st == 0 && si == 0 && stot == 0) {
        label.regime = Regime::Neutral;
    } else if (st == 1 && si == -1 && stot == 0) {
        label.regime = Regime::Compensatory;
    } else if (st == 1 && si == 0 && stot == 1) {
        label.regime = Regime::ClassicalScalable;
    } else if (si == 1 && stot == 0) {
        label.regime = Regime::QuantumIdle;
        label.excluded = true;
    } else if (si == 0 && stot == -1) {
        label.regime = Regime::ArchitectureDeleterious;
        label.excluded = true;
    } else {
        label.regime = Regime::Unclassified;
    }
    return label;
}

} // namespace qmediate
