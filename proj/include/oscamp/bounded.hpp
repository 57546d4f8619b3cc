#pragma once

#include <cmath>
#include <ostream>

namespace oscamp {

/// A number together with an absolute error bound: the exact quantity lies in
/// [value - err, value + err]. Values produced from heuristic (non-rigorous)
/// estimates carry `certified == false`.
template <class Real>
struct BoundedValue
{
    Real value{};
    Real err{};
    bool certified = true;

    Real lower() const { return value - err; }
    Real upper() const { return value + err; }

    bool contains(const Real& x) const
    {
        using std::abs;
        return abs(x - value) <= err;
    }
};

/// True when the two enclosures overlap, i.e. |a - b| <= a.err + b.err.
template <class Real>
bool consistent(const BoundedValue<Real>& a, const BoundedValue<Real>& b, const Real& slack = Real(0))
{
    using std::abs;
    return abs(a.value - b.value) <= a.err + b.err + slack;
}

template <class Real>
std::ostream& operator<<(std::ostream& os, const BoundedValue<Real>& v)
{
    return os << v.value << " +/- " << v.err;
}

}  // namespace oscamp
