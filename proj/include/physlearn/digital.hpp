#pragma once

// Digital resonance: a reversible subtraction stage compares an external
// word stream with an internally generated one, and an extraction unit turns
// every correctly predicted residual bit into k_B T ln 2 of accounted energy.
//
// Energy rules per bit (k_B T ln 2 each):
//   extract a predicted bit   +1
//   erase a bit               -1
//   write known content       -1
//   randomize a bit            0
// Reversible stages cost nothing.

#include <cstdint>
#include <span>
#include <vector>

namespace physlearn {

inline constexpr double kBoltzmann = 1.380649e-23;  // J/K, exact (SI 2019)
inline constexpr double kDefaultTemperature = 300.0;

// k_B T ln 2 in joules.
double landauer_bit_energy(double temperature_K);

// Unsigned integer of a declared bit width (1..64).
class BitWord {
 public:
  BitWord(std::uint64_t value, unsigned width = 8);

  std::uint64_t value() const { return value_; }
  unsigned width() const { return width_; }
  std::uint64_t mask() const;

  // Most significant bit first.
  std::vector<std::uint8_t> bits() const;

  friend bool operator==(const BitWord&, const BitWord&) = default;

 private:
  std::uint64_t value_;
  unsigned width_;
};

struct SubtractOutput {
  BitWord diff;  // (F - f) mod 2^w
  BitWord keep;  // f, retained so the stage stays invertible
};

struct RestoreOutput {
  BitWord F;
  BitWord f;
};

SubtractOutput reversible_subtract(const BitWord& F, const BitWord& f);
RestoreOutput reversible_restore(const BitWord& diff, const BitWord& keep);

enum class LedgerOp { erase, write_known, randomize, extract_predicted };

// Bit counters at a fixed temperature. The joule total is derived from the
// counters, so it always equals (extracted - erased - written) k_B T ln 2.
class EnergyLedger {
 public:
  explicit EnergyLedger(double temperature_K = kDefaultTemperature);

  double temperature() const { return temperature_; }
  double joules() const;
  std::uint64_t n_extracted() const { return n_extracted_; }
  std::uint64_t n_erased() const { return n_erased_; }
  std::uint64_t n_written() const { return n_written_; }
  std::uint64_t n_randomized() const { return n_randomized_; }

  // Restores a ledger from its dumped counters.
  static EnergyLedger from_counters(double temperature_K, std::uint64_t extracted,
                                    std::uint64_t erased, std::uint64_t written,
                                    std::uint64_t randomized);

  friend bool operator==(const EnergyLedger&, const EnergyLedger&) = default;

 private:
  friend EnergyLedger ledger_transact(const EnergyLedger&, LedgerOp, long long);

  double temperature_;
  std::uint64_t n_extracted_ = 0;
  std::uint64_t n_erased_ = 0;
  std::uint64_t n_written_ = 0;
  std::uint64_t n_randomized_ = 0;
};

// Returns the ledger after `n_bits` bits of the given operation.
EnergyLedger ledger_transact(const EnergyLedger& ledger, LedgerOp op, long long n_bits);

// Sequence of residual bits.
class ResidualStream {
 public:
  ResidualStream() = default;
  explicit ResidualStream(std::vector<std::uint8_t> bits);

  std::size_t size() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }
  std::span<const std::uint8_t> bits() const { return bits_; }
  std::size_t count_ones() const;

  friend bool operator==(const ResidualStream&, const ResidualStream&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

struct ExtractionResult {
  ResidualStream out;
  EnergyLedger ledger;
};

// Predicts every residual bit to be 0. A correct prediction is extracted; a
// wrong one has to be erased before the cell is reused. Either way the cell
// is left randomized (energy neutral) with a bit from the seeded generator.
ExtractionResult extract_from_residual(const ResidualStream& stream, const EnergyLedger& ledger,
                                       std::uint64_t rng_seed);

struct DigitalLoopResult {
  double net_joules = 0.0;
  EnergyLedger ledger;
  ResidualStream residual;  // difference bits fed to the extractor
  ResidualStream out;       // randomized extractor output
};

// Word by word: subtract the model word from the external word, check the
// reversible restore, and feed the difference bits (MSB first, words in
// order) to the extractor.
DigitalLoopResult run_digital_loop(std::span<const BitWord> external, std::span<const BitWord> model,
                                   const EnergyLedger& ledger, std::uint64_t rng_seed);

}  // namespace physlearn
