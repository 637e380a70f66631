#include "physlearn/digital.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "physlearn/errors.hpp"
#include "physlearn/random.hpp"

namespace physlearn {

double landauer_bit_energy(double temperature_K) {
  return kBoltzmann * temperature_K * std::numbers::ln2;
}

BitWord::BitWord(std::uint64_t value, unsigned width) : value_(value), width_(width) {
  if (width_ == 0 || width_ > 64) {
    throw InputError("bit width must be in [1, 64], got " + std::to_string(width_));
  }
  if (value_ & ~mask()) {
    throw InputError("value " + std::to_string(value_) + " does not fit in " +
                     std::to_string(width_) + " bits");
  }
}

std::uint64_t BitWord::mask() const {
  return width_ == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << width_) - 1;
}

std::vector<std::uint8_t> BitWord::bits() const {
  std::vector<std::uint8_t> out(width_);
  for (unsigned i = 0; i < width_; ++i) out[i] = (value_ >> (width_ - 1 - i)) & 1u;
  return out;
}

namespace {

void require_same_width(const BitWord& a, const BitWord& b) {
  if (a.width() != b.width()) {
    throw InputError("word widths differ: " + std::to_string(a.width()) + " vs " +
                     std::to_string(b.width()));
  }
}

}  // namespace

SubtractOutput reversible_subtract(const BitWord& F, const BitWord& f) {
  require_same_width(F, f);
  return {BitWord((F.value() - f.value()) & F.mask(), F.width()), f};
}

RestoreOutput reversible_restore(const BitWord& diff, const BitWord& keep) {
  require_same_width(diff, keep);
  return {BitWord((diff.value() + keep.value()) & diff.mask(), diff.width()), keep};
}

EnergyLedger::EnergyLedger(double temperature_K) : temperature_(temperature_K) {
  if (!(temperature_ > 0.0) || !std::isfinite(temperature_)) {
    throw InputError("temperature must be positive and finite");
  }
}

double EnergyLedger::joules() const {
  // Counters are far below 2^53 in practice; the signed difference is formed
  // in integers so the product is a single rounding.
  const auto gained = static_cast<long double>(n_extracted_);
  const auto lost = static_cast<long double>(n_erased_) + static_cast<long double>(n_written_);
  return static_cast<double>(gained - lost) * landauer_bit_energy(temperature_);
}

EnergyLedger EnergyLedger::from_counters(double temperature_K, std::uint64_t extracted,
                                         std::uint64_t erased, std::uint64_t written,
                                         std::uint64_t randomized) {
  EnergyLedger l(temperature_K);
  l.n_extracted_ = extracted;
  l.n_erased_ = erased;
  l.n_written_ = written;
  l.n_randomized_ = randomized;
  return l;
}

EnergyLedger ledger_transact(const EnergyLedger& ledger, LedgerOp op, long long n_bits) {
  if (n_bits < 0) throw InputError("bit count must be nonnegative, got " + std::to_string(n_bits));
  EnergyLedger next = ledger;
  const auto n = static_cast<std::uint64_t>(n_bits);
  switch (op) {
    case LedgerOp::erase: next.n_erased_ += n; break;
    case LedgerOp::write_known: next.n_written_ += n; break;
    case LedgerOp::randomize: next.n_randomized_ += n; break;
    case LedgerOp::extract_predicted: next.n_extracted_ += n; break;
  }
  return next;
}

ResidualStream::ResidualStream(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (bits_[i] > 1) throw InputError("residual bit " + std::to_string(i) + " is not 0/1");
  }
}

std::size_t ResidualStream::count_ones() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

ExtractionResult extract_from_residual(const ResidualStream& stream, const EnergyLedger& ledger,
                                       std::uint64_t rng_seed) {
  Rng rng(rng_seed);
  std::vector<std::uint8_t> out(stream.size());
  const auto ones = static_cast<long long>(stream.count_ones());
  const auto zeros = static_cast<long long>(stream.size()) - ones;
  for (auto& bit : out) bit = random_bit(rng) ? 1 : 0;
  // Every counter update commutes, so the per-bit policy reduces to totals.
  EnergyLedger next = ledger_transact(ledger, LedgerOp::extract_predicted, zeros);
  next = ledger_transact(next, LedgerOp::erase, ones);
  next = ledger_transact(next, LedgerOp::randomize, static_cast<long long>(stream.size()));
  return {ResidualStream(std::move(out)), next};
}

DigitalLoopResult run_digital_loop(std::span<const BitWord> external, std::span<const BitWord> model,
                                   const EnergyLedger& ledger, std::uint64_t rng_seed) {
  if (external.size() != model.size()) {
    throw InputError("external stream has " + std::to_string(external.size()) +
                     " words but model has " + std::to_string(model.size()));
  }
  std::vector<std::uint8_t> residual;
  for (std::size_t i = 0; i < external.size(); ++i) {
    const auto [diff, keep] = reversible_subtract(external[i], model[i]);
    const auto back = reversible_restore(diff, keep);
    if (!(back.F == external[i]) || !(back.f == model[i])) {
      throw NumericalError("reversible stage lost information at word " + std::to_string(i));
    }
    const auto bits = diff.bits();
    residual.insert(residual.end(), bits.begin(), bits.end());
  }
  DigitalLoopResult result;
  result.residual = ResidualStream(std::move(residual));
  auto extracted = extract_from_residual(result.residual, ledger, rng_seed);
  result.out = std::move(extracted.out);
  result.ledger = extracted.ledger;
  const auto gained = static_cast<long double>(result.ledger.n_extracted() - ledger.n_extracted());
  const auto lost = static_cast<long double>(result.ledger.n_erased() - ledger.n_erased()) +
                    static_cast<long double>(result.ledger.n_written() - ledger.n_written());
  result.net_joules =
      static_cast<double>(gained - lost) * landauer_bit_energy(ledger.temperature());
  return result;
}

}  // namespace physlearn
