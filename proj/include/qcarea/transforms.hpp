#pragma once

#include <fftw3.h>

#include <cstdio>
#include <functional>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "qcarea/geometry.hpp"

namespace qcarea {

// ---------------------------------------------------------------------------
// Uniform square grid and complex fields
// ---------------------------------------------------------------------------

/// Cell-centered n x n grid on [-L, L)^2, n a power of two. L >= 2 keeps the
/// closed unit disk (where all compact supports live) well inside the window.
struct GridSpec {
    double half_width;
    std::size_t n;

    GridSpec(double half_width_, std::size_t n_) : half_width(half_width_), n(n_) {
        if (!(half_width >= 2.0)) throw std::invalid_argument("GridSpec: half width must be >= 2");
        if (n < 8 || (n & (n - 1)) != 0)
            throw std::invalid_argument("GridSpec: n must be a power of two, n >= 8");
    }

    double spacing() const { return 2.0 * half_width / static_cast<double>(n); }
    std::size_t size() const { return n * n; }
    Cplx point(std::size_t i, std::size_t j) const {
        const double h = spacing();
        return {-half_width + (static_cast<double>(j) + 0.5) * h,
                -half_width + (static_cast<double>(i) + 0.5) * h};
    }
    bool operator==(const GridSpec& other) const {
        return half_width == other.half_width && n == other.n;
    }
};

struct ComplexField {
    GridSpec grid;
    std::vector<Cplx> values;          // row-major, values[i*n + j]
    std::optional<Disk> support;       // declared compact support, if any

    explicit ComplexField(GridSpec g, std::optional<Disk> s = std::nullopt)
        : grid(g), values(g.size(), Cplx{0.0, 0.0}), support(std::move(s)) {}

    Cplx& at(std::size_t i, std::size_t j) { return values[i * grid.n + j]; }
    Cplx at(std::size_t i, std::size_t j) const { return values[i * grid.n + j]; }
};

using Mask = std::vector<std::uint8_t>;

/// Pointwise sampling at cell centers. Throws on a non-finite sample (pole
/// guard) so that silent contamination cannot happen.
inline ComplexField sample(const std::function<Cplx(Cplx)>& rule, const GridSpec& grid,
                           std::optional<Disk> support = std::nullopt) {
    ComplexField field(grid, std::move(support));
    for (std::size_t i = 0; i < grid.n; ++i)
        for (std::size_t j = 0; j < grid.n; ++j) {
            const Cplx v = rule(grid.point(i, j));
            if (!is_finite_point(v))
                throw std::domain_error("sample: non-finite value at grid point");
            field.at(i, j) = v;
        }
    return field;
}

/// Cell-averaged sampling on a subdiv x subdiv subgrid per cell; the right
/// sampler for indicator-type integrands, where plain center sampling
/// aliases the jump.
inline ComplexField sample_averaged(const std::function<Cplx(Cplx)>& rule, const GridSpec& grid,
                                    std::size_t subdiv = 4,
                                    std::optional<Disk> support = std::nullopt) {
    ComplexField field(grid, std::move(support));
    const double h = grid.spacing();
    const double step = h / static_cast<double>(subdiv);
    for (std::size_t i = 0; i < grid.n; ++i)
        for (std::size_t j = 0; j < grid.n; ++j) {
            const Cplx base = grid.point(i, j) - Cplx{0.5 * h, 0.5 * h};
            Cplx acc{0.0, 0.0};
            for (std::size_t a = 0; a < subdiv; ++a)
                for (std::size_t b = 0; b < subdiv; ++b) {
                    const Cplx v = rule(base + Cplx{(b + 0.5) * step, (a + 0.5) * step});
                    if (!is_finite_point(v))
                        throw std::domain_error("sample_averaged: non-finite value");
                    acc += v;
                }
            field.at(i, j) = acc / static_cast<double>(subdiv * subdiv);
        }
    return field;
}

// ---------------------------------------------------------------------------
// Norms, masks, field arithmetic
// ---------------------------------------------------------------------------

inline double l2_norm(const ComplexField& f) {
    double acc = 0.0;
    for (const Cplx v : f.values) acc += std::norm(v);
    return std::sqrt(acc) * f.grid.spacing();
}

inline Mask mask_all(const GridSpec& grid) { return Mask(grid.size(), 1); }

inline Mask mask_where(const GridSpec& grid, const std::function<bool(Cplx)>& pred) {
    Mask m(grid.size(), 0);
    for (std::size_t i = 0; i < grid.n; ++i)
        for (std::size_t j = 0; j < grid.n; ++j)
            m[i * grid.n + j] = pred(grid.point(i, j)) ? 1 : 0;
    return m;
}

inline Mask mask_and(const Mask& a, const Mask& b) {
    Mask out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = (a[i] && b[i]) ? 1 : 0;
    return out;
}

inline double l2_norm_masked(const ComplexField& f, const Mask& mask) {
    double acc = 0.0;
    for (std::size_t idx = 0; idx < f.values.size(); ++idx)
        if (mask[idx]) acc += std::norm(f.values[idx]);
    return std::sqrt(acc) * f.grid.spacing();
}

/// L2 inner product sum of a conj(b) h^2.
inline Cplx inner_product(const ComplexField& a, const ComplexField& b) {
    if (!(a.grid == b.grid)) throw std::invalid_argument("inner_product: grid mismatch");
    Cplx acc{0.0, 0.0};
    for (std::size_t idx = 0; idx < a.values.size(); ++idx)
        acc += a.values[idx] * std::conj(b.values[idx]);
    const double h = a.grid.spacing();
    return acc * (h * h);
}

/// sum over masked cells of w(z) |f(z)| h^2 (weighted L1 against a mask).
inline double l1_weighted_masked(const ComplexField& f, const std::function<double(Cplx)>& weight,
                                 const Mask& mask) {
    double acc = 0.0;
    const std::size_t n = f.grid.n;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t idx = i * n + j;
            if (mask[idx]) acc += weight(f.grid.point(i, j)) * std::abs(f.values[idx]);
        }
    const double h = f.grid.spacing();
    return acc * h * h;
}

inline double relative_l2_error(const ComplexField& got, const ComplexField& want,
                                const Mask& mask) {
    double num = 0.0, den = 0.0;
    for (std::size_t idx = 0; idx < got.values.size(); ++idx) {
        if (!mask[idx]) continue;
        num += std::norm(got.values[idx] - want.values[idx]);
        den += std::norm(want.values[idx]);
    }
    if (den == 0.0) return std::sqrt(num);
    return std::sqrt(num / den);
}

inline ComplexField operator-(const ComplexField& a, const ComplexField& b) {
    if (!(a.grid == b.grid)) throw std::invalid_argument("field subtraction: grid mismatch");
    ComplexField out(a.grid);
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = a.values[i] - b.values[i];
    return out;
}

inline ComplexField operator+(const ComplexField& a, const ComplexField& b) {
    if (!(a.grid == b.grid)) throw std::invalid_argument("field addition: grid mismatch");
    ComplexField out(a.grid, a.support);
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = a.values[i] + b.values[i];
    return out;
}

/// Pointwise product; the result inherits `a`'s declared support (the use
/// case is multiplying by a compactly supported coefficient field).
inline ComplexField multiply(const ComplexField& a, const ComplexField& b) {
    if (!(a.grid == b.grid)) throw std::invalid_argument("field product: grid mismatch");
    ComplexField out(a.grid, a.support);
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = a.values[i] * b.values[i];
    return out;
}

// ---------------------------------------------------------------------------
// Discrete Wirtinger derivatives (centered differences; border ring zero)
// ---------------------------------------------------------------------------

namespace detail {

inline void centered_gradients(const ComplexField& f, ComplexField& dx, ComplexField& dy) {
    const std::size_t n = f.grid.n;
    const double inv2h = 1.0 / (2.0 * f.grid.spacing());
    for (std::size_t i = 1; i + 1 < n; ++i)
        for (std::size_t j = 1; j + 1 < n; ++j) {
            dx.at(i, j) = (f.at(i, j + 1) - f.at(i, j - 1)) * inv2h;
            dy.at(i, j) = (f.at(i + 1, j) - f.at(i - 1, j)) * inv2h;
        }
}

}  // namespace detail

inline ComplexField wirtinger_d(const ComplexField& f) {
    ComplexField dx(f.grid), dy(f.grid);
    detail::centered_gradients(f, dx, dy);
    ComplexField out(f.grid);
    for (std::size_t i = 0; i < out.values.size(); ++i)
        out.values[i] = 0.5 * (dx.values[i] - Cplx{0.0, 1.0} * dy.values[i]);
    return out;
}

inline ComplexField wirtinger_dbar(const ComplexField& f) {
    ComplexField dx(f.grid), dy(f.grid);
    detail::centered_gradients(f, dx, dy);
    ComplexField out(f.grid);
    for (std::size_t i = 0; i < out.values.size(); ++i)
        out.values[i] = 0.5 * (dx.values[i] + Cplx{0.0, 1.0} * dy.values[i]);
    return out;
}

// ---------------------------------------------------------------------------
// Cauchy and Hilbert (Beurling) transforms
// ---------------------------------------------------------------------------

namespace detail {

inline void fft2_inplace(std::vector<Cplx>& data, std::size_t n, int sign) {
    fftw_plan plan = fftw_plan_dft_2d(
        static_cast<int>(n), static_cast<int>(n), reinterpret_cast<fftw_complex*>(data.data()),
        reinterpret_cast<fftw_complex*>(data.data()), sign, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
}

inline void check_support_margin(const ComplexField& f, const char* op) {
    if (!f.support)
        throw std::domain_error(std::string(op) + ": field has no declared compact support");
    const double extent = std::abs(f.support->center) + f.support->radius;
    // Margin >= L - 1 to the window edge, i.e. the support must stay within
    // the closed unit disk; beyond that, wraparound contaminates the result.
    if (extent > 1.0 + 1e-9)
        throw std::domain_error(std::string(op) + ": support margin violation (extent " +
                                std::to_string(extent) + " > 1)");
}

/// Free-space convolution of f with a translation kernel, via FFT on the
/// zero-padded doubled grid (a discrete Fourier multiplier with no
/// wraparound: the singular kernels here decay too slowly for the periodic
/// window to be usable). The kernel is sampled at cell offsets; the 0 tap is
/// the kernel's cell average, which vanishes by symmetry for both kernels
/// used below.
template <typename Kernel>
inline ComplexField padded_convolution(const ComplexField& f, Kernel&& kernel_at) {
    const std::size_t n = f.grid.n;
    const std::size_t big = 2 * n;
    const double h = f.grid.spacing();

    std::vector<Cplx> padded(big * big, Cplx{0.0, 0.0});
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) padded[i * big + j] = f.at(i, j);

    std::vector<Cplx> kernel(big * big, Cplx{0.0, 0.0});
    const auto nn = static_cast<std::ptrdiff_t>(n);
    const auto bb = static_cast<std::ptrdiff_t>(big);
    for (std::ptrdiff_t di = -nn; di < nn; ++di)
        for (std::ptrdiff_t dj = -nn; dj < nn; ++dj) {
            if (di == 0 && dj == 0) continue;
            const std::size_t ii = static_cast<std::size_t>((di + bb) % bb);
            const std::size_t jj = static_cast<std::size_t>((dj + bb) % bb);
            kernel[ii * big + jj] =
                kernel_at(Cplx{static_cast<double>(dj) * h, static_cast<double>(di) * h});
        }

    detail::fft2_inplace(padded, big, FFTW_FORWARD);
    detail::fft2_inplace(kernel, big, FFTW_FORWARD);
    for (std::size_t i = 0; i < padded.size(); ++i) padded[i] *= kernel[i];
    detail::fft2_inplace(padded, big, FFTW_BACKWARD);

    ComplexField out(f.grid);
    const double scale = h * h / static_cast<double>(big * big);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out.at(i, j) = padded[i * big + j] * scale;
    return out;
}

}  // namespace detail

/// Beurling transform: principal-value convolution with -1/(pi zeta^2). On
/// the symmetric cell grid the kernel's ring sums cancel exactly, which is
/// the discrete principal value; the zero-padded FFT keeps it free-space.
/// The sign convention is pinned by the calibration identity H[dbar f] = d f
/// for the explicit two-branch witness map; see the tests.
inline ComplexField hilbert(const ComplexField& f) {
    detail::check_support_margin(f, "hilbert");
    return detail::padded_convolution(f, [](Cplx zeta) { return -1.0 / (kPi * zeta * zeta); });
}

/// Cauchy transform: convolution with 1/(pi zeta), the zeta = 0 tap replaced
/// by the kernel's cell average (zero by symmetry). The output decays like
/// 1/|z| with no wraparound; a discrete dbar of the output recovers the
/// input and a discrete d matches hilbert().
inline ComplexField cauchy(const ComplexField& f) {
    detail::check_support_margin(f, "cauchy");
    return detail::padded_convolution(f, [](Cplx zeta) { return 1.0 / (kPi * zeta); });
}

// ---------------------------------------------------------------------------
// Field dumps: header "n L", then n^2 lines "re im", row-major. The 17
// significant digits round-trip IEEE doubles exactly.
// ---------------------------------------------------------------------------

inline void write_field(std::ostream& out, const ComplexField& f) {
    out << f.grid.n << ' ' << f.grid.half_width << '\n';
    char line[96];
    for (const Cplx v : f.values) {
        std::snprintf(line, sizeof line, "%.17g %.17g\n", v.real(), v.imag());
        out << line;
    }
}

inline ComplexField read_field(std::istream& in) {
    std::size_t n = 0;
    double half_width = 0.0;
    if (!(in >> n >> half_width)) throw std::runtime_error("field dump: malformed header");
    ComplexField f{GridSpec{half_width, n}};
    for (auto& v : f.values) {
        double re = 0.0, im = 0.0;
        if (!(in >> re >> im)) throw std::runtime_error("field dump: truncated values");
        v = {re, im};
    }
    return f;
}

}  // namespace qcarea
