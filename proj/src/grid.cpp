#include "fcns/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace fcns {

Grid1D::Grid1D(double x_left, double x_right, std::size_t n)
   : x_left_(x_left), x_right_(x_right), n_(n)
{
   if (!(x_left < x_right) || !std::isfinite(x_left) || !std::isfinite(x_right))
      throw std::invalid_argument("grid: need finite x_left < x_right");
   if (n < 3)
      throw std::invalid_argument("grid: need at least 3 nodes");
   h_ = (x_right - x_left) / static_cast<double>(n - 1);
}

std::vector<double> Grid1D::nodes() const
{
   std::vector<double> xs(n_);
   for (std::size_t i = 0; i < n_; ++i)
      xs[i] = x(i);
   return xs;
}

GridFunction::GridFunction(Grid1D grid, double fill)
   : grid_(grid), values_(grid.size(), fill)
{
}

GridFunction::GridFunction(Grid1D grid, std::vector<double> values)
   : grid_(grid), values_(std::move(values))
{
   if (values_.size() != grid_.size())
      throw std::invalid_argument("grid function: value count does not match grid");
}

GridFunction GridFunction::sample(const Grid1D& grid, const std::function<double(double)>& f)
{
   GridFunction g(grid);
   for (std::size_t i = 0; i < grid.size(); ++i)
      g[i] = f(grid.x(i));
   return g;
}

double GridFunction::interpolate(double x) const
{
   const double h = grid_.h();
   const double slack = 1e-12 * std::max(1.0, std::abs(grid_.x_right() - grid_.x_left()));
   if (x < grid_.x_left() - slack || x > grid_.x_right() + slack) {
      std::ostringstream msg;
      msg << "interpolation point " << x << " outside [" << grid_.x_left() << ", "
          << grid_.x_right() << "]";
      throw std::out_of_range(msg.str());
   }
   const double s = (x - grid_.x_left()) / h;
   const auto last = static_cast<double>(values_.size() - 1);
   const double sc = std::clamp(s, 0.0, last);
   auto i = static_cast<std::size_t>(std::floor(sc));
   if (i >= values_.size() - 1)
      i = values_.size() - 2;
   const double theta = sc - static_cast<double>(i);
   if (theta == 0.0)
      return values_[i];
   return (1.0 - theta) * values_[i] + theta * values_[i + 1];
}

double GridFunction::min() const { return *std::min_element(values_.begin(), values_.end()); }
double GridFunction::max() const { return *std::max_element(values_.begin(), values_.end()); }

bool GridFunction::all_finite() const
{
   return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

namespace {

void require_same_grid(const GridFunction& a, const GridFunction& b)
{
   if (!(a.grid() == b.grid()))
      throw std::invalid_argument("grid functions live on different grids");
}

} // namespace

GridFunction& GridFunction::operator+=(const GridFunction& o)
{
   require_same_grid(*this, o);
   for (std::size_t i = 0; i < values_.size(); ++i)
      values_[i] += o.values_[i];
   return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& o)
{
   require_same_grid(*this, o);
   for (std::size_t i = 0; i < values_.size(); ++i)
      values_[i] -= o.values_[i];
   return *this;
}

GridFunction& GridFunction::operator*=(double a)
{
   for (auto& v : values_)
      v *= a;
   return *this;
}

GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
GridFunction operator*(double a, GridFunction f) { return f *= a; }

GridFunction hadamard(GridFunction a, const GridFunction& b)
{
   require_same_grid(a, b);
   for (std::size_t i = 0; i < a.size(); ++i)
      a[i] *= b[i];
   return a;
}

GridFunction map(GridFunction f, const std::function<double(double)>& op)
{
   for (auto& v : f.data())
      v = op(v);
   return f;
}

GridFunction diff1(const GridFunction& f)
{
   const std::size_t n = f.size();
   const double h = f.grid().h();
   GridFunction d(f.grid());
   for (std::size_t i = 1; i + 1 < n; ++i)
      d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
   d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
   d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
   return d;
}

GridFunction diff2(const GridFunction& f)
{
   const std::size_t n = f.size();
   const double h2 = f.grid().h() * f.grid().h();
   GridFunction d(f.grid());
   for (std::size_t i = 1; i + 1 < n; ++i)
      d[i] = (f[i - 1] - 2.0 * f[i] + f[i + 1]) / h2;
   if (n >= 4) {
      d[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h2;
      d[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / h2;
   } else {
      d[0] = d[1];
      d[n - 1] = d[n - 2];
   }
   return d;
}

GridFunction diffk(const GridFunction& f, int k)
{
   if (k < 0)
      throw std::invalid_argument("diffk: negative order");
   GridFunction d = f;
   for (int j = 0; j < k; ++j)
      d = diff1(d);
   return d;
}

double integrate(const GridFunction& f)
{
   const std::size_t n = f.size();
   double s = 0.5 * (f[0] + f[n - 1]);
   for (std::size_t i = 1; i + 1 < n; ++i)
      s += f[i];
   return s * f.grid().h();
}

GridFunction cumulative(const GridFunction& f)
{
   const double h = f.grid().h();
   GridFunction c(f.grid());
   c[0] = 0.0;
   for (std::size_t i = 1; i < f.size(); ++i)
      c[i] = c[i - 1] + 0.5 * h * (f[i - 1] + f[i]);
   return c;
}

double norm_l1(const GridFunction& f) { return integrate(map(f, [](double v) { return std::abs(v); })); }

double norm_l2(const GridFunction& f)
{
   return std::sqrt(integrate(map(f, [](double v) { return v * v; })));
}

double norm_sup(const GridFunction& f)
{
   double m = 0.0;
   for (double v : f.values())
      m = std::max(m, std::abs(v));
   return m;
}

namespace {

void check_order(int k)
{
   if (k < 0 || k > 3)
      throw std::invalid_argument("Sobolev index must be in 0..3");
}

} // namespace

double seminorm_h(const GridFunction& f, int k)
{
   check_order(k);
   return norm_l2(diffk(f, k));
}

double norm_h(const GridFunction& f, int k)
{
   check_order(k);
   double s = 0.0;
   GridFunction d = f;
   for (int j = 0; j <= k; ++j) {
      const double nj = norm_l2(d);
      s += nj * nj;
      if (j < k)
         d = diff1(d);
   }
   return std::sqrt(s);
}

double left_trace_d1(std::span<const double> f, double h)
{
   if (f.size() < 6)
      throw std::invalid_argument("left_trace_d1: need 6 samples");
   return (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / (12.0 * h);
}

double left_trace_d2(std::span<const double> f, double h)
{
   if (f.size() < 6)
      throw std::invalid_argument("left_trace_d2: need 6 samples");
   return (45.0 * f[0] - 154.0 * f[1] + 214.0 * f[2] - 156.0 * f[3] + 61.0 * f[4] - 10.0 * f[5])
          / (12.0 * h * h);
}

} // namespace fcns
