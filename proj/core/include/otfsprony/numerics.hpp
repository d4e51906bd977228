///
/// \file numerics.hpp
///
/// Dense complex kernels used by the estimator: DFT, Toeplitz assembly,
/// SVD-based least squares, minimum-norm null vectors and polynomial roots.
///
#ifndef OTFSPRONY_NUMERICS_HPP
#define OTFSPRONY_NUMERICS_HPP

#include <complex>
#include <vector>

#include <Eigen/Core>

#include <otfsprony/errors.hpp>

namespace otfsprony
{

using Complex       = std::complex<double>;
using Index         = Eigen::Index;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector    = Eigen::VectorXd;

inline constexpr double pi = 3.14159265358979323846;

/// Relative cut-off below which singular values are treated as zero in
/// pseudo-inverses.
inline constexpr double pinv_relative_tolerance = 1e-12;

/// Smallest |a[0]| accepted when rescaling a unit-norm Prony vector.
inline constexpr double leading_coefficient_threshold = 1e-8;

enum class DftDirection
{
    forward, ///< kernel exp(-j 2 pi k n / L)
    inverse  ///< kernel exp(+j 2 pi k n / L), scaled by 1 / L
};

///
/// Discrete Fourier transform of arbitrary length. Power-of-two lengths use
/// an iterative radix-2 FFT, other lengths a direct sum over a precomputed
/// twiddle table.
///
ComplexVector dft(const ComplexVector& v, DftDirection direction);

///
/// Toeplitz matrix with entries `y[start_offset + i - j]`, `j = 0..order`.
///
/// Rows run over every `i >= 0` for which `start_offset + i` indexes the
/// series, i.e. `y.size() - start_offset` rows. With `start_offset == order`
/// this is the usual Prony data matrix of the linear recurrence
/// `sum_j a[j] y[k - j] = 0`.
///
ComplexMatrix toeplitz_from_series(const ComplexVector& y, Index order,
                                   Index start_offset);

/// Same as above with an explicit row count.
ComplexMatrix toeplitz_from_series(const ComplexVector& y, Index order,
                                   Index start_offset, Index rows);

/// Singular values in non-increasing order.
RealVector singular_values(const ComplexMatrix& a);

/// sigma_max / sigma_min; +inf for a numerically singular matrix.
double condition_number(const ComplexMatrix& a);

/// Moore-Penrose pseudo-inverse with relative truncation at
/// `pinv_relative_tolerance * sigma_max`.
ComplexMatrix pseudo_inverse(const ComplexMatrix& a);

/// Minimum-norm minimiser of ||B - A X||_F, i.e. `pinv(A) * B`.
ComplexMatrix least_squares(const ComplexMatrix& a, const ComplexMatrix& b);

struct NullVector
{
    ComplexVector a; ///< unit-norm right singular vector for sigma_min
    double rss;      ///< sigma_min^2 (zero when rows < cols)
};

/// Unit-norm minimiser of ||T a||^2.
NullVector min_norm_null_vector(const ComplexMatrix& t);

enum class PronyMode
{
    constrained, ///< a[0] = 1, tail = -pinv(T~) t0
    min_norm     ///< smallest right singular vector rescaled to a[0] = 1
};

///
/// Coefficients `(a[0], ..., a[p])`, `a[0] == 1`, of the prediction
/// polynomial `a[0] x^p + a[1] x^(p-1) + ... + a[p]` annihilating the
/// Toeplitz data matrix `t` (which has `p + 1` columns).
///
/// \throws DegenerateLeadingCoefficient in `min_norm` mode when
///         `|a[0]| < leading_coefficient_threshold`.
///
ComplexVector prony_coefficients(const ComplexMatrix& t, PronyMode mode);

///
/// Roots (with multiplicity) of `c[0] x^n + c[1] x^(n-1) + ... + c[n]`,
/// computed as eigenvalues of the companion matrix.
///
std::vector<Complex> polynomial_roots(const ComplexVector& coeffs);

/// Horner evaluation of the same coefficient layout.
Complex polyval(const ComplexVector& coeffs, Complex x);

} // namespace otfsprony

#endif
