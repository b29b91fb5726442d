#pragma once

#include <vector>

#include "iln/channel.hpp"
#include "iln/rates.hpp"

namespace iln {

enum class SharingMode { FullSpectrum, Orthogonal };
enum class BaselineKind { Repeater, InterferenceChannel };

const char* to_string(SharingMode m);
const char* to_string(BaselineKind k);

/// Which subcarriers each transmitter uses and the (equal-split) power it
/// puts on each of them. Orthogonal sharing keeps the per-user sets within
/// disjoint contiguous blocks; full sharing resolves contention by the
/// higher per-subcarrier secrecy estimate.
struct SharingAssignment {
  SharingMode mode = SharingMode::FullSpectrum;
  std::vector<std::vector<int>> active;      // per user, ascending indices
  std::vector<double> per_subcarrier_power;  // per user, on each active entry
};

/// Layer-1 repeater: R = sqrt(P_r^max / (MN)) * I, spending the whole relay
/// budget on amplification.
RelayMatrix repeater_relay(const Scenario& scenario);

/// Relay switched off; the network degenerates to an interference channel.
RelayMatrix ic_relay(const Scenario& scenario);

SharingAssignment assign_spectrum(const ChannelSet& ch,
                                  const RelayMatrix& relay,
                                  const Scenario& scenario, SharingMode mode);

/// Builds the baseline relay and diagonal precoders for the assignment and
/// evaluates the full (leakage-aware) rate report.
RateReport baseline_report(const ChannelSet& ch, const Scenario& scenario,
                           BaselineKind kind, SharingMode mode);

}  // namespace iln
