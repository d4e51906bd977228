#include <otfsprony/numerics.hpp>

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace otfsprony
{
namespace
{

bool is_power_of_two(Index n)
{
    return n > 0 && (n & (n - 1)) == 0;
}

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& m, const char* what)
{
    if (!m.allFinite())
    {
        throw InvalidArgument(std::string(what) + ": non-finite entry");
    }
}

// Twiddles are evaluated from the reduced integer phase so that every factor
// is accurate to one ulp regardless of transform length.
Complex twiddle(Index k, Index n, double sign)
{
    const double angle = sign * 2.0 * pi * static_cast<double>(k % n) /
                         static_cast<double>(n);
    return std::polar(1.0, angle);
}

void fft_radix2_inplace(ComplexVector& x, double sign)
{
    const Index n = x.size();
    for (Index i = 1, j = 0; i < n; ++i)
    {
        Index bit = n >> 1;
        for (; j & bit; bit >>= 1)
        {
            j ^= bit;
        }
        j ^= bit;
        if (i < j)
        {
            std::swap(x[i], x[j]);
        }
    }
    for (Index len = 2; len <= n; len <<= 1)
    {
        const Index half = len / 2;
        for (Index k = 0; k < half; ++k)
        {
            const Complex w = twiddle(k, len, sign);
            for (Index start = 0; start < n; start += len)
            {
                const Complex u = x[start + k];
                const Complex v = x[start + k + half] * w;
                x[start + k]        = u + v;
                x[start + k + half] = u - v;
            }
        }
    }
}

ComplexVector dft_direct(const ComplexVector& v, double sign)
{
    const Index n = v.size();
    std::vector<Complex> table(static_cast<std::size_t>(n));
    for (Index k = 0; k < n; ++k)
    {
        table[static_cast<std::size_t>(k)] = twiddle(k, n, sign);
    }
    ComplexVector out(n);
    for (Index k = 0; k < n; ++k)
    {
        Complex acc{0.0, 0.0};
        for (Index t = 0; t < n; ++t)
        {
            acc += v[t] * table[static_cast<std::size_t>((k * t) % n)];
        }
        out[k] = acc;
    }
    return out;
}

} // namespace

ComplexVector dft(const ComplexVector& v, DftDirection direction)
{
    if (v.size() == 0)
    {
        throw InvalidArgument("dft: empty vector");
    }
    const double sign = direction == DftDirection::forward ? -1.0 : 1.0;
    ComplexVector out;
    if (is_power_of_two(v.size()))
    {
        out = v;
        fft_radix2_inplace(out, sign);
    }
    else
    {
        out = dft_direct(v, sign);
    }
    if (direction == DftDirection::inverse)
    {
        out /= static_cast<double>(v.size());
    }
    return out;
}

ComplexMatrix toeplitz_from_series(const ComplexVector& y, Index order,
                                   Index start_offset)
{
    return toeplitz_from_series(y, order, start_offset, y.size() - start_offset);
}

ComplexMatrix toeplitz_from_series(const ComplexVector& y, Index order,
                                   Index start_offset, Index rows)
{
    if (order < 1)
    {
        throw InvalidArgument("toeplitz_from_series: order must be >= 1");
    }
    if (rows < 1 || start_offset - order < 0 ||
        start_offset + rows - 1 >= y.size())
    {
        throw InvalidArgument(
            "toeplitz_from_series: index out of range (len=" +
            std::to_string(y.size()) + ", order=" + std::to_string(order) +
            ", offset=" + std::to_string(start_offset) +
            ", rows=" + std::to_string(rows) + ")");
    }
    ComplexMatrix t(rows, order + 1);
    for (Index i = 0; i < rows; ++i)
    {
        for (Index j = 0; j <= order; ++j)
        {
            t(i, j) = y[start_offset + i - j];
        }
    }
    return t;
}

RealVector singular_values(const ComplexMatrix& a)
{
    if (a.size() == 0)
    {
        return RealVector();
    }
    Eigen::JacobiSVD<ComplexMatrix> svd(a);
    return svd.singularValues();
}

double condition_number(const ComplexMatrix& a)
{
    const RealVector s = singular_values(a);
    if (s.size() == 0)
    {
        return std::numeric_limits<double>::infinity();
    }
    const double smin = s[s.size() - 1];
    // rows < cols leaves a nontrivial nullspace not visible in s
    if (smin <= 0.0 || a.rows() < a.cols())
    {
        return std::numeric_limits<double>::infinity();
    }
    return s[0] / smin;
}

ComplexMatrix pseudo_inverse(const ComplexMatrix& a)
{
    require_finite(a, "pseudo_inverse");
    if (a.size() == 0)
    {
        return ComplexMatrix::Zero(a.cols(), a.rows());
    }
    Eigen::JacobiSVD<ComplexMatrix> svd(a, Eigen::ComputeThinU |
                                               Eigen::ComputeThinV);
    const RealVector& s = svd.singularValues();
    const double cutoff = pinv_relative_tolerance * s[0];
    RealVector s_inv = RealVector::Zero(s.size());
    for (Index i = 0; i < s.size(); ++i)
    {
        if (s[i] > cutoff && s[i] > 0.0)
        {
            s_inv[i] = 1.0 / s[i];
        }
    }
    return svd.matrixV() * s_inv.asDiagonal() * svd.matrixU().adjoint();
}

ComplexMatrix least_squares(const ComplexMatrix& a, const ComplexMatrix& b)
{
    if (a.rows() != b.rows())
    {
        throw InvalidArgument("least_squares: A has " +
                              std::to_string(a.rows()) + " rows, B has " +
                              std::to_string(b.rows()));
    }
    require_finite(b, "least_squares");
    return pseudo_inverse(a) * b;
}

NullVector min_norm_null_vector(const ComplexMatrix& t)
{
    if (t.cols() < 1 || t.rows() < 1)
    {
        throw InvalidArgument("min_norm_null_vector: empty matrix");
    }
    require_finite(t, "min_norm_null_vector");
    Eigen::JacobiSVD<ComplexMatrix> svd(t, Eigen::ComputeFullV);
    const Index n = t.cols();
    ComplexVector a = svd.matrixV().col(n - 1);
    double rss = 0.0;
    if (t.rows() >= n)
    {
        const double smin = svd.singularValues()[n - 1];
        rss = smin * smin;
    }
    return {std::move(a), rss};
}

ComplexVector prony_coefficients(const ComplexMatrix& t, PronyMode mode)
{
    if (t.cols() < 2)
    {
        throw InvalidArgument("prony_coefficients: need at least 2 columns");
    }
    const Index order = t.cols() - 1;
    ComplexVector a(order + 1);
    if (mode == PronyMode::constrained)
    {
        const ComplexMatrix tail = t.rightCols(order);
        const ComplexMatrix t0   = t.col(0);
        a[0]                     = 1.0;
        a.tail(order)            = -least_squares(tail, t0).col(0);
        return a;
    }
    const NullVector nv = min_norm_null_vector(t);
    const double lead   = std::abs(nv.a[0]);
    if (lead < leading_coefficient_threshold)
    {
        throw DegenerateLeadingCoefficient(lead);
    }
    a = nv.a / nv.a[0];
    return a;
}

Complex polyval(const ComplexVector& coeffs, Complex x)
{
    Complex acc{0.0, 0.0};
    for (Index i = 0; i < coeffs.size(); ++i)
    {
        acc = acc * x + coeffs[i];
    }
    return acc;
}

std::vector<Complex> polynomial_roots(const ComplexVector& coeffs)
{
    if (coeffs.size() < 2)
    {
        throw InvalidArgument("polynomial_roots: degree must be >= 1");
    }
    if (coeffs[0] == Complex{0.0, 0.0})
    {
        throw InvalidArgument("polynomial_roots: zero leading coefficient");
    }
    require_finite(coeffs, "polynomial_roots");
    const Index degree = coeffs.size() - 1;
    if (degree == 1)
    {
        return {-coeffs[1] / coeffs[0]};
    }

    // Companion matrix of the monic polynomial: first row holds -c[k]/c[0].
    ComplexMatrix companion = ComplexMatrix::Zero(degree, degree);
    for (Index k = 0; k < degree; ++k)
    {
        companion(0, k) = -coeffs[k + 1] / coeffs[0];
    }
    for (Index k = 1; k < degree; ++k)
    {
        companion(k, k - 1) = 1.0;
    }
    Eigen::ComplexEigenSolver<ComplexMatrix> eig(companion, false);
    if (eig.info() != Eigen::Success)
    {
        throw std::runtime_error("polynomial_roots: eigenvalue iteration failed");
    }

    // One Newton correction per root, kept only when it lowers |p(z)|.
    ComplexVector derivative(degree);
    for (Index k = 0; k < degree; ++k)
    {
        derivative[k] = coeffs[k] * static_cast<double>(degree - k);
    }
    std::vector<Complex> roots(static_cast<std::size_t>(degree));
    for (Index k = 0; k < degree; ++k)
    {
        Complex z         = eig.eigenvalues()[k];
        const Complex pz  = polyval(coeffs, z);
        const Complex dpz = polyval(derivative, z);
        if (std::abs(dpz) > 0.0)
        {
            const Complex candidate = z - pz / dpz;
            if (std::isfinite(candidate.real()) &&
                std::isfinite(candidate.imag()) &&
                std::abs(polyval(coeffs, candidate)) < std::abs(pz))
            {
                z = candidate;
            }
        }
        roots[static_cast<std::size_t>(k)] = z;
    }
    return roots;
}

} // namespace otfsprony
