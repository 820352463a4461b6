#include "opgrowth/pauli.hpp"

#include <bit>

namespace opgrowth {

namespace {

int popcount_and(const std::vector<uint64_t>& a, const std::vector<uint64_t>& b) {
  int c = 0;
  for (size_t i = 0; i < a.size(); ++i) c += std::popcount(a[i] & b[i]);
  return c;
}

int popcount(const std::vector<uint64_t>& a) {
  int c = 0;
  for (uint64_t w : a) c += std::popcount(w);
  return c;
}

}  // namespace

char pauli_char(Pauli p) {
  switch (p) {
    case Pauli::I: return 'I';
    case Pauli::X: return 'X';
    case Pauli::Z: return 'Z';
    case Pauli::Y: return 'Y';
  }
  throw std::logic_error("bad Pauli code");
}

Pauli pauli_from_char(char c) {
  switch (c) {
    case 'I': return Pauli::I;
    case 'X': return Pauli::X;
    case 'Z': return Pauli::Z;
    case 'Y': return Pauli::Y;
  }
  throw std::invalid_argument(std::string("bad Pauli character: ") + c);
}

PauliString::PauliString(int n) : n_(n) {
  if (n < 0) throw std::invalid_argument("PauliString: negative n");
  size_t words = (static_cast<size_t>(n) + 63) / 64;
  x_.assign(words, 0);
  z_.assign(words, 0);
}

PauliString PauliString::single(int n, int site, Pauli p) {
  PauliString s(n);
  s.set_site(site, p);
  return s;
}

PauliString PauliString::parse(const std::string& text) {
  PauliString s(static_cast<int>(text.size()));
  for (size_t i = 0; i < text.size(); ++i)
    s.set_site(static_cast<int>(i), pauli_from_char(text[i]));
  return s;
}

Pauli PauliString::site(int i) const {
  if (i < 0 || i >= n_) throw std::out_of_range("PauliString::site");
  uint8_t x = (x_[i / 64] >> (i % 64)) & 1u;
  uint8_t z = (z_[i / 64] >> (i % 64)) & 1u;
  return static_cast<Pauli>(x | (z << 1));
}

void PauliString::set_site(int i, Pauli p) {
  if (i < 0 || i >= n_) throw std::out_of_range("PauliString::set_site");
  uint64_t bit = uint64_t(1) << (i % 64);
  uint8_t code = static_cast<uint8_t>(p);
  if (code & 1u) x_[i / 64] |= bit; else x_[i / 64] &= ~bit;
  if (code & 2u) z_[i / 64] |= bit; else z_[i / 64] &= ~bit;
}

int PauliString::size() const {
  int c = 0;
  for (size_t i = 0; i < x_.size(); ++i) c += std::popcount(x_[i] | z_[i]);
  return c;
}

bool PauliString::is_identity() const {
  for (size_t i = 0; i < x_.size(); ++i)
    if (x_[i] | z_[i]) return false;
  return true;
}

std::string PauliString::to_string() const {
  std::string out(static_cast<size_t>(n_), 'I');
  for (int i = 0; i < n_; ++i) out[static_cast<size_t>(i)] = pauli_char(site(i));
  return out;
}

int PhasedString::phase_sign() const {
  if (!phase_is_real()) throw std::logic_error("PhasedString: imaginary phase");
  return phase_exponent == 0 ? 1 : -1;
}

bool commutes(const PauliString& a, const PauliString& b) {
  if (a.n_ != b.n_) throw std::invalid_argument("commutes: length mismatch");
  int sym = popcount_and(a.x_, b.z_) + popcount_and(a.z_, b.x_);
  return (sym & 1) == 0;
}

PhasedString multiply(const PauliString& a, const PauliString& b) {
  if (a.n_ != b.n_) throw std::invalid_argument("multiply: length mismatch");
  PhasedString out;
  out.string = PauliString(a.n_);
  // Write each factor as i^{#Y} X^x Z^z; moving Z^{a.z} past X^{b.x} costs
  // (-1)^{popcount(a.z & b.x)}, and the result re-absorbs i per Y site.
  int k = popcount_and(a.x_, a.z_) + popcount_and(b.x_, b.z_) +
          2 * popcount_and(a.z_, b.x_);
  for (size_t i = 0; i < a.x_.size(); ++i) {
    out.string.x_[i] = a.x_[i] ^ b.x_[i];
    out.string.z_[i] = a.z_[i] ^ b.z_[i];
  }
  k -= popcount_and(out.string.x_, out.string.z_);
  out.phase_exponent = static_cast<uint8_t>(((k % 4) + 4) % 4);
  return out;
}

int size_superop_eigencheck(const PauliString& p) {
  // Each anticommuting single-site Pauli contributes 2/4 to the eigenvalue;
  // the total is always an integer.
  int half_units = 0;
  for (int i = 0; i < p.n(); ++i) {
    for (Pauli q : {Pauli::X, Pauli::Y, Pauli::Z}) {
      if (!commutes(PauliString::single(p.n(), i, q), p)) ++half_units;
    }
  }
  if (half_units % 2 != 0)
    throw std::logic_error("size_superop_eigencheck: non-integer eigenvalue");
  return half_units / 2;
}

Rng Rng::fork(uint64_t seed, uint64_t index) {
  Rng mix(seed ^ (0x9e3779b97f4a7c15ULL * (index + 1)));
  mix.next_u64();
  mix.next_u64();
  return Rng(mix.next_u64());
}

uint64_t Rng::next_u64() {
  uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

uint64_t Rng::next_below(uint64_t bound) {
  // Rejection sampling keeps the draw exactly uniform.
  uint64_t threshold = (~bound + 1) % bound;
  for (;;) {
    uint64_t r = next_u64();
    if (r >= threshold) return r % bound;
  }
}

double Rng::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

PauliString random_string(int n, Rng& rng, bool only_non_identity) {
  if (n < 1) throw std::invalid_argument("random_string: n must be >= 1");
  for (;;) {
    PauliString s(n);
    for (int i = 0; i < n; ++i)
      s.set_site(i, static_cast<Pauli>(rng.next_below(4)));
    if (!only_non_identity || !s.is_identity()) return s;
  }
}

}  // namespace opgrowth
