#pragma once

#include <stdexcept>
#include <string>

namespace fcns {

// Specific volume left the admissible set v > 1.
class DomainError : public std::domain_error
{
public:
   using std::domain_error::domain_error;
};

// Far-field data violating the entropy condition or otherwise unusable.
class InvalidEndStates : public std::invalid_argument
{
public:
   using std::invalid_argument::invalid_argument;
};

// Numerical failure of an integrator, Newton solve or fixed-point iteration.
class SolverError : public std::runtime_error
{
public:
   using std::runtime_error::runtime_error;
};

// A discrete state crossed a hard constraint (v <= floor, non-monotone path).
class ConstraintViolation : public SolverError
{
public:
   using SolverError::SolverError;
};

// The free-boundary interface stopped advancing (x~' <= 0 or x~ < 0).
class MonotonicityViolation : public ConstraintViolation
{
public:
   using ConstraintViolation::ConstraintViolation;
};

} // namespace fcns
