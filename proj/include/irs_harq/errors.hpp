#ifndef IRS_HARQ_ERRORS_HPP
#define IRS_HARQ_ERRORS_HPP

#include <stdexcept>

namespace irs_harq
{

/// An argument outside the mathematical domain of an operation.
class domain_error : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

/// A series, continued fraction or root search that failed to meet its
/// tolerance within the iteration cap.
class convergence_error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

} // namespace irs_harq

#endif // IRS_HARQ_ERRORS_HPP
