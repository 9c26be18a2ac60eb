#pragma once

#include <filesystem>
#include <vector>

namespace vvl {

// Scalar functionals sampled at snapshot instants.
struct FunctionalSeries {
  std::vector<double> times;
  std::vector<double> energy;            // E(t)
  std::vector<double> damping_integral;  // a int_0^t int rho |u|^2
  std::vector<double> viscous_integral;  // eps int_0^t int S(grad u):grad u
  std::vector<double> relative_energy;   // against a reference solution; may be empty

  std::size_t size() const { return times.size(); }
  bool operator==(const FunctionalSeries&) const = default;
};

// CSV with header "t,E,damping_int,viscous_int,rel_energy". Missing
// relative energies are written as "nan". Values use shortest round-trip form.
void write_series_csv(const std::filesystem::path& path, const FunctionalSeries& series);
FunctionalSeries read_series_csv(const std::filesystem::path& path);

}  // namespace vvl
