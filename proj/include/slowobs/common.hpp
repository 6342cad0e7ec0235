#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace slowobs {

using Vec = std::vector<double>;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// State left the model's admissible domain (non-positive populations, level
/// outside the admissible observable range, ...).
struct DomainError : Error {
  using Error::Error;
};

struct IntegrationError : Error {
  IntegrationError(const std::string& what, double t)
      : Error(what), last_valid_time(t) {}
  double last_valid_time;
};

double dot(const Vec& a, const Vec& b);
double norm(const Vec& a);
double dist(const Vec& a, const Vec& b);

/// Prints with 17 significant digits so the value round-trips exactly.
std::string format_double(double v);

Vec linspace(double lo, double hi, int n);

}  // namespace slowobs
