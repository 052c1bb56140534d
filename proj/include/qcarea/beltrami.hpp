#pragma once

#include <vector>

#include "qcarea/extremal_maps.hpp"
#include "qcarea/transforms.hpp"

namespace qcarea {

/// Grid-sampled Beltrami coefficient with its sup bound k < 1; support must
/// stay inside the closed unit disk.
struct DilatationField {
    ComplexField field;
    double k;
};

/// Sample the complex dilatation of a piecewise map from its analytic branch
/// jets. Cells straddling a branch seam are zeroed (a measure-O(h) set); the
/// conformal branches contribute exact zeros.
inline DilatationField sample_dilatation(const PiecewiseQCMap& map, const GridSpec& grid) {
    ComplexField mu(grid, Disk{0.0, 1.0});
    const double straddle = 0.71 * grid.spacing();
    double max_abs = 0.0;
    for (std::size_t i = 0; i < grid.n; ++i)
        for (std::size_t j = 0; j < grid.n; ++j) {
            const Cplx z = grid.point(i, j);
            if (map.seam_distance(z) <= straddle) continue;
            const MapBranch& branch = map.branch_at(z);
            if (branch.conformal) continue;
            const MapJet jet = branch.jet(z);
            const Cplx value = jet.dilatation();
            mu.at(i, j) = value;
            max_abs = std::max(max_abs, std::abs(value));
        }
    return {std::move(mu), std::max(map.params().k(), max_abs)};
}

struct BeltramiSolution {
    ComplexField w;    // dbar g
    ComplexField dg;   // d g = (1-pz)^-2 + H[w]
    ComplexField g;    // z/(1-pz) + T[w]
    std::size_t iterations = 0;
    double residual = 0.0;
    std::vector<double> residual_history;  // ||w_{m+1} - w_m||_2 per step
};

/// Fixed-point solve of w = mu (1-pz)^-2 + mu H[w] (the partial sums of the
/// geometric transform series), then reconstruction of d g and g. Converges
/// geometrically with ratio k; non-convergence within max_iter is an error.
/// tol <= 0 selects the default 1e-6 * ||w0||_2.
inline BeltramiSolution neumann_solve(const DilatationField& mu, double p, double tol = -1.0,
                                      std::size_t max_iter = 200) {
    if (!(mu.k >= 0.0 && mu.k < 1.0))
        throw std::invalid_argument("neumann_solve: dilatation bound k must be in [0, 1)");
    if (!(p >= 0.0 && p < 1.0)) throw std::invalid_argument("neumann_solve: p must be in [0, 1)");
    for (const Cplx v : mu.field.values)
        if (std::abs(v) > mu.k + 1e-12)
            throw std::invalid_argument("neumann_solve: |mu| exceeds the declared bound k");

    const GridSpec grid = mu.field.grid;

    // phi = (1-pz)^-2 evaluated where needed; a cell center colliding with
    // the pole (possible only for special p) contributes a zeroed tap.
    auto phi_at = [p](Cplx z) -> Cplx {
        const Cplx den = 1.0 - p * z;
        if (std::abs(den) < 1e-12) return 0.0;
        return 1.0 / (den * den);
    };

    ComplexField w0(grid, mu.field.support);
    for (std::size_t i = 0; i < grid.n; ++i)
        for (std::size_t j = 0; j < grid.n; ++j) {
            const Cplx m = mu.field.at(i, j);
            if (m != 0.0) w0.at(i, j) = m * phi_at(grid.point(i, j));
        }

    const double w0_norm = l2_norm(w0);
    const double tol_abs = tol > 0.0 ? tol : 1e-6 * w0_norm;

    BeltramiSolution sol{ComplexField(grid), ComplexField(grid), ComplexField(grid)};
    ComplexField w = w0;
    double residual = 0.0;
    bool converged = w0_norm == 0.0;  // mu == 0: w = 0 after the first step
    for (std::size_t m = 0; m < max_iter && !converged; ++m) {
        ComplexField hw = hilbert(w);
        ComplexField next(grid, mu.field.support);
        for (std::size_t idx = 0; idx < next.values.size(); ++idx) {
            const Cplx mv = mu.field.values[idx];
            next.values[idx] = w0.values[idx] + (mv == 0.0 ? Cplx{0.0, 0.0} : mv * hw.values[idx]);
        }
        residual = l2_norm(next - w);
        sol.residual_history.push_back(residual);
        w = std::move(next);
        if (residual <= tol_abs) converged = true;
    }
    if (!converged) throw std::runtime_error("neumann_solve: no convergence within max_iter");

    sol.iterations = std::max<std::size_t>(sol.residual_history.size(), 1);
    sol.residual = residual;
    sol.w = std::move(w);
    sol.w.support = mu.field.support;

    ComplexField hw = hilbert(sol.w);
    ComplexField tw = cauchy(sol.w);
    sol.dg = ComplexField(grid);
    sol.g = ComplexField(grid);
    for (std::size_t i = 0; i < grid.n; ++i)
        for (std::size_t j = 0; j < grid.n; ++j) {
            const Cplx z = grid.point(i, j);
            sol.dg.at(i, j) = phi_at(z) + hw.at(i, j);
            const Cplx den = 1.0 - p * z;
            const Cplx g0 = std::abs(den) < 1e-12 ? Cplx{0.0, 0.0} : z / den;
            sol.g.at(i, j) = g0 + tw.at(i, j);
        }
    return sol;
}

}  // namespace qcarea
