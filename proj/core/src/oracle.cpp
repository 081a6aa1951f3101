#include "romlab/oracle.hpp"

#include <stdexcept>

namespace romlab {

const char* identity_name(Identity who) {
  switch (who) {
    case Identity::alice: return "alice";
    case Identity::bob: return "bob";
    case Identity::eve: return "eve";
  }
  return "?";
}

void OracleSpec::validate() const {
  if (ell < 1 || ell > 64) throw std::invalid_argument("OracleSpec: ell must be in [1,64]");
  if (domain_size) {
    if (*domain_size == 0) throw std::invalid_argument("OracleSpec: empty domain");
    if (ell < 64 && *domain_size > (1ull << ell)) {
      throw std::invalid_argument("OracleSpec: domain_size exceeds 2^ell");
    }
  }
}

bool OracleSpec::query_legal(const Bitstring& q) const {
  if (q.len != ell) return false;
  if (domain_size && q.value >= *domain_size) return false;
  return true;
}

std::optional<uint64_t> OracleSpec::legal_count() const {
  if (domain_size) return *domain_size;
  if (ell <= 26) return 1ull << ell;
  return std::nullopt;
}

LazyOracle::LazyOracle(OracleSpec spec, uint64_t seed) : spec_(spec), seed_(seed) {
  spec_.validate();
}

Bitstring LazyOracle::fresh_answer(const Bitstring& q) const {
  uint64_t h = splitmix64(mix_seed(seed_, q.value, static_cast<uint64_t>(q.len)));
  return Bitstring(spec_.ell, h);
}

Bitstring LazyOracle::query(Identity who, const Bitstring& q) {
  if (q.len != spec_.ell) throw std::invalid_argument("oracle query: wrong length");
  if (!spec_.query_legal(q)) throw std::invalid_argument("oracle query: outside restricted domain");

  auto [it, inserted] = table_.try_emplace(q, Bitstring());
  if (inserted) it->second = fresh_answer(q);

  uint8_t mask = static_cast<uint8_t>(1u << static_cast<int>(who));
  uint8_t& asked = asked_by_[q];
  if (!(asked & mask)) {
    asked |= mask;
    ++counts_[static_cast<int>(who)];
  }
  return it->second;
}

LazyOracle LazyOracle::from_constraints(OracleSpec spec, std::span<const QueryAnswer> constraints,
                                        uint64_t seed) {
  LazyOracle oracle(spec, seed);
  for (const auto& [q, a] : constraints) {
    if (!oracle.spec_.query_legal(q)) {
      throw std::invalid_argument("oracle constraint: illegal query");
    }
    if (a.len != oracle.spec_.ell) {
      throw std::invalid_argument("oracle constraint: wrong answer length");
    }
    auto [it, inserted] = oracle.table_.try_emplace(q, a);
    if (!inserted && it->second != a) {
      throw std::invalid_argument("oracle constraint: contradictory answers for one query");
    }
  }
  return oracle;
}

void LazyOracle::dump_csv(std::ostream& os) const {
  for (const auto& [q, a] : table_) {
    os << q.to_hex() << "," << a.to_hex() << "\n";
  }
}

}  // namespace romlab
