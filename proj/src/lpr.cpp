#include "covshift/lpr.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "covshift/error.hpp"

namespace covshift {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Systems better conditioned than this are solved through the normal equations
// even in MinNorm mode.
constexpr double kNormalEquationRcond = 1e-10;

void check_inputs(const SampleSet& data, std::span<const double> x_star, const LprConfig& cfg) {
    if (x_star.size() != data.ambient_dim())
        throw InputError("x_star has " + std::to_string(x_star.size()) + " coordinates, data has " +
                         std::to_string(data.ambient_dim()));
    if (!(cfg.bandwidth > 0.0) || !std::isfinite(cfg.bandwidth))
        throw InputError("bandwidth must be positive and finite");
    if (cfg.ridge_epsilon < 0.0) throw InputError("ridge_epsilon must be non-negative");
    if (cfg.truncation && (cfg.truncation->tau < 0.0 || !(cfg.truncation->psi > 0.0)))
        throw InputError("truncation requires tau >= 0 and psi > 0");
}

struct Solution {
    double value = 0.0;
    int rank = 0;
    Eigen::VectorXd weights;  // per active row, only when requested
};

Eigen::MatrixXd regularised(const LocalSystem& sys, double ridge) {
    Eigen::MatrixXd s = sys.gram;
    if (ridge > 0.0) s.diagonal().array() += ridge;
    return s;
}

Solution solve_normal_equations(const LocalSystem& sys, double ridge, bool want_weights) {
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(regularised(sys, ridge));
    Solution out;
    out.rank = static_cast<int>(sys.gram.rows());
    out.value = ldlt.solve(sys.moment)(0);
    if (want_weights) {
        Eigen::VectorXd e1 = Eigen::VectorXd::Zero(sys.gram.rows());
        e1(0) = 1.0;
        const Eigen::VectorXd g = ldlt.solve(e1);
        out.weights = sys.kernel_weights.cwiseProduct(sys.design * g);
    }
    return out;
}

Solution solve_min_norm(const LocalSystem& sys, double ridge, double rank_rcond, std::span<const double> y,
                        bool want_weights) {
    const Eigen::Index rows = sys.design.rows();
    const Eigen::Index cols = sys.design.cols();
    const Eigen::Index extra = ridge > 0.0 ? cols : 0;

    const Eigen::VectorXd sqrt_k = sys.kernel_weights.cwiseSqrt();
    Eigen::MatrixXd a(rows + extra, cols);
    a.topRows(rows) = sqrt_k.asDiagonal() * sys.design;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(rows + extra);
    for (Eigen::Index r = 0; r < rows; ++r) rhs(r) = sqrt_k(r) * y[sys.active[static_cast<std::size_t>(r)]];
    if (extra > 0) a.bottomRows(extra) = std::sqrt(ridge) * Eigen::MatrixXd::Identity(cols, cols);

    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
    cod.setThreshold(rank_rcond);
    cod.compute(a);

    Solution out;
    out.rank = static_cast<int>(cod.rank());
    out.value = cod.solve(rhs)(0);
    if (want_weights) {
        const Eigen::MatrixXd pinv = cod.pseudoInverse();
        out.weights = sqrt_k.cwiseProduct(pinv.row(0).head(rows).transpose());
    }
    return out;
}

struct Spectrum {
    double min = 0.0;
    double max = 0.0;
};

Spectrum spectrum(const Eigen::MatrixXd& gram) {
    if (gram.rows() == 0) return {};
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    return {ev(0), ev(ev.size() - 1)};
}

// Shared by lpr_fit and effective_weights; fills the diagnostics of `fit`.
Solution solve(const LocalSystem& sys, std::size_t n_total, const LprConfig& cfg, std::span<const double> y,
               bool want_weights, LprFit& fit) {
    const Spectrum sp = spectrum(sys.gram);
    fit.min_eigenvalue = sp.min;
    fit.max_eigenvalue = sp.max;
    fit.active_count = sys.active.size();
    fit.truncated = false;

    if (cfg.truncation) {
        const double floor = static_cast<double>(n_total) * cfg.truncation->tau * cfg.truncation->psi;
        if (sp.min < floor) {
            fit.truncated = true;
            fit.value = 0.0;
            fit.rank = 0;
            return {};
        }
    }

    const double lo = sp.min + cfg.ridge_epsilon;
    const double hi = sp.max + cfg.ridge_epsilon;
    const auto deg = static_cast<int>(sys.gram.rows());

    Solution sol;
    if (cfg.solve == SolveMode::Strict) {
        if (!(hi > 0.0) || lo <= cfg.singular_rcond * hi) throw SingularSystem(sp.min, sp.max);
        sol = solve_normal_equations(sys, cfg.ridge_epsilon, want_weights);
    } else if (sys.active.empty() && cfg.ridge_epsilon == 0.0) {
        sol.value = 0.0;
        sol.rank = 0;
        sol.weights = Eigen::VectorXd();
    } else if (hi > 0.0 && lo > kNormalEquationRcond * hi) {
        sol = solve_normal_equations(sys, cfg.ridge_epsilon, want_weights);
    } else {
        sol = solve_min_norm(sys, cfg.ridge_epsilon, cfg.rank_rcond, y, want_weights);
    }
    fit.value = sol.value;
    fit.rank = sol.rank;
    fit.rank_deficient = sol.rank < deg;
    return sol;
}

}  // namespace

LocalSystem assemble_system(const SampleSet& data, std::span<const double> x_star, const LprConfig& cfg) {
    check_inputs(data, x_star, cfg);
    const PolyBasis basis(static_cast<int>(data.ambient_dim()), cfg.degree);
    const auto n = static_cast<std::ptrdiff_t>(data.size());
    const std::size_t dim = data.ambient_dim();

    std::vector<double> k(static_cast<std::size_t>(n));
#pragma omp parallel
    {
        std::vector<double> u(dim);
#pragma omp for schedule(static)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            const auto xi = data.x(static_cast<std::size_t>(i));
            for (std::size_t j = 0; j < dim; ++j) u[j] = (xi[j] - x_star[j]) / cfg.bandwidth;
            k[static_cast<std::size_t>(i)] = kernel_eval(cfg.kernel, u);
        }
    }

    LocalSystem sys;
    for (std::size_t i = 0; i < k.size(); ++i)
        if (k[i] > 0.0) sys.active.push_back(i);

    const auto rows = static_cast<std::ptrdiff_t>(sys.active.size());
    const auto cols = static_cast<Eigen::Index>(basis.size());
    RowMatrix z(rows, cols);
    sys.kernel_weights.resize(rows);
#pragma omp parallel
    {
        std::vector<double> u(dim);
#pragma omp for schedule(static)
        for (std::ptrdiff_t r = 0; r < rows; ++r) {
            const std::size_t i = sys.active[static_cast<std::size_t>(r)];
            const auto xi = data.x(i);
            for (std::size_t j = 0; j < dim; ++j) u[j] = (xi[j] - x_star[j]) / cfg.bandwidth;
            basis.eval_into(u, std::span<double>(z.row(r).data(), static_cast<std::size_t>(cols)));
            sys.kernel_weights(r) = k[i];
        }
    }
    sys.design = z;

    Eigen::VectorXd ky(rows);
    for (std::ptrdiff_t r = 0; r < rows; ++r)
        ky(r) = sys.kernel_weights(r) * data.y(sys.active[static_cast<std::size_t>(r)]);

    const Eigen::MatrixXd weighted = sys.kernel_weights.cwiseSqrt().asDiagonal() * sys.design;
    sys.gram = Eigen::MatrixXd::Zero(cols, cols);
    sys.gram.selfadjointView<Eigen::Lower>().rankUpdate(weighted.transpose());
    sys.gram = sys.gram.selfadjointView<Eigen::Lower>();
    sys.moment = sys.design.transpose() * ky;
    return sys;
}

LocalSystem assemble_system_serial(const SampleSet& data, std::span<const double> x_star,
                                   const LprConfig& cfg) {
    check_inputs(data, x_star, cfg);
    const PolyBasis basis(static_cast<int>(data.ambient_dim()), cfg.degree);
    const std::size_t dim = data.ambient_dim();
    const auto deg = static_cast<Eigen::Index>(basis.size());

    LocalSystem sys;
    sys.gram = Eigen::MatrixXd::Zero(deg, deg);
    sys.moment = Eigen::VectorXd::Zero(deg);
    std::vector<std::vector<double>> rows;
    std::vector<double> weights;
    std::vector<double> u(dim);
    std::vector<double> z(static_cast<std::size_t>(deg));
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto xi = data.x(i);
        for (std::size_t j = 0; j < dim; ++j) u[j] = (xi[j] - x_star[j]) / cfg.bandwidth;
        const double k = kernel_eval(cfg.kernel, u);
        if (k == 0.0) continue;
        basis.eval_into(u, z);
        for (Eigen::Index a = 0; a < deg; ++a) {
            sys.moment(a) += k * z[a] * data.y(i);
            for (Eigen::Index b = 0; b < deg; ++b) sys.gram(a, b) += k * z[a] * z[b];
        }
        sys.active.push_back(i);
        rows.push_back(z);
        weights.push_back(k);
    }
    sys.design.resize(static_cast<Eigen::Index>(rows.size()), deg);
    sys.kernel_weights.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (Eigen::Index a = 0; a < deg; ++a) sys.design(static_cast<Eigen::Index>(r), a) = rows[r][a];
        sys.kernel_weights(static_cast<Eigen::Index>(r)) = weights[r];
    }
    return sys;
}

LprFit lpr_fit(const LocalSystem& system, std::size_t n_total, const LprConfig& cfg, std::span<const double> y) {
    LprFit fit;
    solve(system, n_total, cfg, y, false, fit);
    return fit;
}

LprFit lpr_fit(const SampleSet& data, std::span<const double> x_star, const LprConfig& cfg) {
    const LocalSystem sys = assemble_system(data, x_star, cfg);
    return lpr_fit(sys, data.size(), cfg, data.responses());
}

std::vector<double> effective_weights(const SampleSet& data, std::span<const double> x_star,
                                      const LprConfig& cfg) {
    const LocalSystem sys = assemble_system(data, x_star, cfg);
    LprFit fit;
    const Solution sol = solve(sys, data.size(), cfg, data.responses(), true, fit);
    if (fit.truncated) throw NotAvailable("effective weights are undefined for a truncated fit");
    std::vector<double> w(data.size(), 0.0);
    for (std::size_t r = 0; r < sys.active.size(); ++r) w[sys.active[r]] = sol.weights(static_cast<Eigen::Index>(r));
    return w;
}

}  // namespace covshift
