#ifndef OTFSPRONY_ERRORS_HPP
#define OTFSPRONY_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace otfsprony
{

/// Precondition violation: bad shape, index out of range, invalid parameter.
class InvalidArgument : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// The unit-norm Prony vector has a leading coefficient too small to
/// normalise to one. Reducing the model order usually resolves it.
class DegenerateLeadingCoefficient : public std::runtime_error
{
public:
    explicit DegenerateLeadingCoefficient(double magnitude)
        : std::runtime_error("degenerate leading Prony coefficient |a[0]| = " +
                             std::to_string(magnitude)),
          m_magnitude(magnitude)
    {
    }

    double magnitude() const noexcept
    {
        return m_magnitude;
    }

private:
    double m_magnitude;
};

/// Estimated Doppler phasor matrix is numerically rank deficient.
class IllConditionedDopplerSet : public std::runtime_error
{
public:
    explicit IllConditionedDopplerSet(double condition)
        : std::runtime_error("ill-conditioned Doppler set, cond(E) = " +
                             std::to_string(condition)),
          m_condition(condition)
    {
    }

    double condition() const noexcept
    {
        return m_condition;
    }

private:
    double m_condition;
};

/// File system failure while reading scenarios or writing artifacts.
class IoError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

} // namespace otfsprony

#endif
