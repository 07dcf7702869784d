#pragma once

#include <cstddef>
#include <vector>

namespace fcns {

// Thomas algorithm for a[i] x[i-1] + b[i] x[i] + c[i] x[i+1] = d[i].
// a[0] and c[n-1] are ignored. Returns false on a zero pivot.
inline bool solve_tridiagonal(const std::vector<double>& a, const std::vector<double>& b,
                              const std::vector<double>& c, std::vector<double>& d)
{
   const std::size_t n = d.size();
   std::vector<double> cp(n);
   double beta = b[0];
   if (beta == 0.0)
      return false;
   cp[0] = c[0] / beta;
   d[0] /= beta;
   for (std::size_t i = 1; i < n; ++i) {
      beta = b[i] - a[i] * cp[i - 1];
      if (beta == 0.0)
         return false;
      cp[i] = i + 1 < n ? c[i] / beta : 0.0;
      d[i] = (d[i] - a[i] * d[i - 1]) / beta;
   }
   for (std::size_t i = n - 1; i-- > 0;)
      d[i] -= cp[i] * d[i + 1];
   return true;
}

} // namespace fcns
