#pragma once

#include <functional>
#include <string>
#include <vector>

#include "cventropic/entropy.hpp"
#include "cventropic/qstate.hpp"

namespace cventropic {

enum class Basis { position, momentum };

/// f(x) sampled on the position grid or g(p) sampled on the momentum grid
/// (the momentum grid coincides with the position grid, see fourier_apply).
struct DiagonalObservable {
  Basis basis = Basis::position;
  std::vector<double> values;
  std::string descriptor;

  static DiagonalObservable from_function(Basis basis, const GridSpec& grid, const std::function<double(double)>& fn,
                                          std::string descriptor);
  /// scale * v^power + offset, v = x or p.
  static DiagonalObservable polynomial(Basis basis, const GridSpec& grid, int power, double scale = 1.0,
                                       double offset = 0.0);
  /// Parses "x", "x^2", "p^3", "2*x+1", "-0.5*p^2-3" and similar.
  static DiagonalObservable parse(const std::string& text, const GridSpec& grid);
};

/// Pushforward entropy of an observable. `value` is -infinity for an observable
/// that is constant on the effective support.
struct ObservableEntropy {
  EntropyEstimate estimate;
  std::size_t bins = 0;
  double refined_change = 0.0;  // |H(2*bins) - H(bins)|
  bool low_confidence = false;  // refined_change >= 5e-3
  bool constant = false;
};

ObservableEntropy observable_entropy(const WaveFunction& state, const DiagonalObservable& obs);

/// |<psi|[f(x), g(p)]|psi>|. The raw expectation must be imaginary; its real part
/// is returned for diagnostics and a ResolutionError is thrown when it exceeds 1e-6.
struct CommutatorExpectation {
  double magnitude = 0.0;
  double real_part = 0.0;
};
CommutatorExpectation commutator_expectation(const WaveFunction& state, const DiagonalObservable& f,
                                             const DiagonalObservable& g);

struct ProbeRecord {
  std::string state_descriptor;
  std::string f_descriptor;
  std::string g_descriptor;
  double entropy_a = 0.0;
  double entropy_b = 0.0;
  double commutator_expectation = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  // entropy_a + entropy_b - rhs
  bool low_confidence = false;
  bool trivially_satisfied = false;  // commutator expectation vanishes: rhs = -infinity
  std::string error;                 // set when a numerical sentinel was hit
};

/// Never throws on numerical trouble: failures are recorded in ProbeRecord::error.
ProbeRecord probe(const WaveFunction& state, const DiagonalObservable& f, const DiagonalObservable& g,
                  std::string state_descriptor = {});

/// Most negative margin first; ties keep input order.
std::vector<ProbeRecord> rank_records(std::vector<ProbeRecord> records);

}  // namespace cventropic
