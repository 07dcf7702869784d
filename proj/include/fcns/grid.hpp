#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace fcns {

// Uniform node-centred grid on [x_left, x_right] with n >= 3 nodes.
class Grid1D
{
public:
   Grid1D() = default;
   Grid1D(double x_left, double x_right, std::size_t n);

   double x_left() const { return x_left_; }
   double x_right() const { return x_right_; }
   std::size_t size() const { return n_; }
   double h() const { return h_; }
   double x(std::size_t i) const { return x_left_ + static_cast<double>(i) * h_; }
   std::vector<double> nodes() const;

   bool operator==(const Grid1D&) const = default;

private:
   double x_left_ = 0.0;
   double x_right_ = 1.0;
   std::size_t n_ = 3;
   double h_ = 0.5;
};

// Nodal values of a field on a Grid1D.
class GridFunction
{
public:
   GridFunction() = default;
   explicit GridFunction(Grid1D grid, double fill = 0.0);
   GridFunction(Grid1D grid, std::vector<double> values);

   static GridFunction sample(const Grid1D& grid, const std::function<double(double)>& f);

   const Grid1D& grid() const { return grid_; }
   std::size_t size() const { return values_.size(); }
   double operator[](std::size_t i) const { return values_[i]; }
   double& operator[](std::size_t i) { return values_[i]; }
   std::span<const double> values() const { return values_; }
   std::vector<double>& data() { return values_; }
   double front() const { return values_.front(); }
   double back() const { return values_.back(); }

   // Piecewise-linear interpolation; throws std::out_of_range outside the grid.
   double interpolate(double x) const;
   double min() const;
   double max() const;
   bool all_finite() const;

   GridFunction& operator+=(const GridFunction& o);
   GridFunction& operator-=(const GridFunction& o);
   GridFunction& operator*=(double a);

private:
   Grid1D grid_;
   std::vector<double> values_;
};

GridFunction operator+(GridFunction a, const GridFunction& b);
GridFunction operator-(GridFunction a, const GridFunction& b);
GridFunction operator*(double a, GridFunction f);
// Pointwise product.
GridFunction hadamard(GridFunction a, const GridFunction& b);
GridFunction map(GridFunction f, const std::function<double(double)>& op);

// First derivative: central inside, second-order one-sided at both ends.
GridFunction diff1(const GridFunction& f);
// Second derivative: 3-point inside, 4-point one-sided at the ends (n >= 4).
GridFunction diff2(const GridFunction& f);
GridFunction diffk(const GridFunction& f, int k);

// Composite trapezoid rule.
double integrate(const GridFunction& f);
// Running trapezoid antiderivative, zero at x_left.
GridFunction cumulative(const GridFunction& f);

double norm_l1(const GridFunction& f);
double norm_l2(const GridFunction& f);
double norm_sup(const GridFunction& f);
// || d^k f ||_{L2}, k in 0..3.
double seminorm_h(const GridFunction& f, int k);
// sqrt(sum_{j<=k} || d^j f ||^2), k in 0..3.
double norm_h(const GridFunction& f, int k);

// Fourth-order one-sided derivatives at the left end of a sampled field
// (needs at least 6 samples). Used for traces at x = 0+.
double left_trace_d1(std::span<const double> f, double h);
double left_trace_d2(std::span<const double> f, double h);

// Second-order one-sided first derivative at the left end.
inline double left_d1(std::span<const double> f, double h)
{
   return (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
}

} // namespace fcns
