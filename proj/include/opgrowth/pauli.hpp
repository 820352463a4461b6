#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace opgrowth {

/// Single-site Pauli, encoded as (x, z) bit pair: code = x | (z << 1).
enum class Pauli : uint8_t { I = 0, X = 1, Z = 2, Y = 3 };

char pauli_char(Pauli p);
Pauli pauli_from_char(char c);

struct PhasedString;

/// n-qubit Pauli string in the symplectic (x, z) bitmask representation.
/// Bit i of x_bits set means site i carries an X component, bit i of z_bits
/// a Z component; (1,1) is Y. Supports n up to a few thousand sites via
/// multi-word masks. Immutable value semantics; all mutation goes through
/// set_site().
class PauliString {
 public:
  PauliString() = default;
  explicit PauliString(int n);

  static PauliString identity(int n) { return PauliString(n); }
  /// Single-site Pauli p at `site`, identity elsewhere.
  static PauliString single(int n, int site, Pauli p);
  /// Parse from text over {I,X,Y,Z}, site 0 leftmost, e.g. "YIZX".
  static PauliString parse(const std::string& text);

  int n() const { return n_; }
  Pauli site(int i) const;
  void set_site(int i, Pauli p);

  /// Number of non-identity tensor factors.
  int size() const;
  bool is_identity() const;

  const std::vector<uint64_t>& x_words() const { return x_; }
  const std::vector<uint64_t>& z_words() const { return z_; }

  bool operator==(const PauliString& o) const = default;

  std::string to_string() const;

 private:
  int n_ = 0;
  std::vector<uint64_t> x_, z_;

  friend bool commutes(const PauliString&, const PauliString&);
  friend struct PhasedString;
  friend PhasedString multiply(const PauliString&, const PauliString&);
};

/// Pauli string with a phase i^k, k in 0..3. Products of Hermitian Pauli
/// strings never leave this group.
struct PhasedString {
  PauliString string;
  uint8_t phase_exponent = 0;  // value is i^phase_exponent

  bool phase_is_real() const { return (phase_exponent & 1u) == 0; }
  /// +1 or -1; throws if the phase is imaginary.
  int phase_sign() const;
};

/// True iff ab == ba, from the symplectic form
/// popcount(a.x & b.z) + popcount(a.z & b.x) mod 2.
bool commutes(const PauliString& a, const PauliString& b);

/// Product a*b with phase tracked modulo i^k.
PhasedString multiply(const PauliString& a, const PauliString& b);

/// Eigenvalue of the size superoperator -sum_{P_i}(P_i p P_i - p)/4,
/// evaluated symbolically over all 3n single-site non-identity Paulis.
/// Equals size(p) for every Pauli string.
int size_superop_eigencheck(const PauliString& p);

/// 64-bit splittable counter RNG (splitmix64). Used for all stochastic
/// sampling so that streams are reproducible and cheaply forkable per
/// trajectory / shot.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}
  /// Derive an independent stream for worker `index` of a run seeded with
  /// `seed`; streams for distinct indices are decorrelated.
  static Rng fork(uint64_t seed, uint64_t index);

  uint64_t next_u64();
  /// Uniform in [0, bound).
  uint64_t next_below(uint64_t bound);
  double next_double();  // uniform in [0, 1)

 private:
  uint64_t state_;
};

/// Uniform over all 4^n strings; with only_non_identity, uniform over the
/// 4^n - 1 non-identity strings.
PauliString random_string(int n, Rng& rng, bool only_non_identity = false);

}  // namespace opgrowth
