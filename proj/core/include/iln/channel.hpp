#pragma once

#include <cstdint>
#include <string>
#include <tuple>
#include <vector>

#include "iln/numerics.hpp"

namespace iln {

// Network dimensions and power budgets. Powers are linear (not dB).
struct Scenario {
  int num_users = 2;        // K
  int num_subcarriers = 1;  // M
  int relay_antennas = 1;   // N
  std::vector<double> tx_power_budget;  // per user
  double relay_power_budget = 1.0;
  std::vector<int> streams;  // S_i, defaults to num_subcarriers each

  static Scenario make(int users, int subcarriers, int antennas,
                       double tx_budget, double relay_budget);
  void validate() const;  // throws std::invalid_argument
};

enum class ChannelDistribution { Uniform01, ComplexGaussian };

const char* to_string(ChannelDistribution d);
ChannelDistribution distribution_from_string(const std::string& s);

/// One realization of all channels: direct scalars h_{ji}(m), uplink vectors
/// f_i(m) and downlink vectors g_j(m). Stored per subcarrier; the big
/// block-diagonal matrices are materialized on demand.
class ChannelSet {
 public:
  ChannelSet(int num_users, int num_subcarriers, int relay_antennas);

  int num_users() const { return users_; }
  int num_subcarriers() const { return subcarriers_; }
  int relay_antennas() const { return antennas_; }
  int relay_dim() const { return subcarriers_ * antennas_; }  // MN

  Complex direct(int rx, int tx, int m) const;          // h_{rx,tx}(m)
  const CVector& uplink(int tx, int m) const;           // f_tx(m)
  const CVector& downlink(int rx, int m) const;         // g_rx(m)

  void set_direct(int rx, int tx, int m, Complex value);
  void set_uplink(int tx, int m, CVector value);
  void set_downlink(int rx, int m, CVector value);

  CMatrix direct_matrix(int rx, int tx) const;    // H_{rx,tx}: M x M diagonal
  CMatrix uplink_matrix(int tx) const;            // F_tx: NM x M
  CMatrix downlink_matrix(int rx) const;          // G_rx: MN x M

 private:
  int users_;
  int subcarriers_;
  int antennas_;
  std::vector<Complex> direct_;     // [rx][tx][m]
  std::vector<CVector> uplink_;     // [tx][m]
  std::vector<CVector> downlink_;   // [rx][m]
};

/// Per-user precoding matrices, square M x M with exactly S_i non-zero
/// columns. Zero-padded columns are exact zeros.
struct Precoders {
  std::vector<CMatrix> matrices;
  std::vector<std::vector<int>> active_columns;

  static Precoders from_matrices(std::vector<CMatrix> mats);

  int num_users() const { return static_cast<int>(matrices.size()); }
  int streams(int user) const;
  CMatrix compact(int user) const;  // M x S_i, the non-zero columns
  double power(int user) const;     // tr(P_i P_i^H)
  CMatrix block_diagonal() const;   // diag(P_1, ..., P_K): KM x KM
};

enum class RelayStructure { General, BlockDiagonal, ScaledIdentity, Zero };

/// The MN x MN relay processing matrix. The MN axis is ordered subcarrier-
/// major: rows [f*N, (f+1)*N) belong to subcarrier f, so the N x N block
/// (f, m) forwards the signal received on subcarrier m to subcarrier f.
struct RelayMatrix {
  CMatrix matrix;
  int antennas = 1;
  RelayStructure structure_tag = RelayStructure::General;

  static RelayMatrix zero(int subcarriers, int antennas);
  static RelayMatrix scaled_identity(int subcarriers, int antennas,
                                     double scale);
  static RelayMatrix from_frequency_blocks(const std::vector<CMatrix>& blocks,
                                           int antennas);
  static RelayMatrix general(CMatrix m, int antennas);

  int subcarriers() const {
    return static_cast<int>(matrix.rows()) / antennas;
  }
  CMatrix block(int to_subcarrier, int from_subcarrier) const;
};

ChannelSet generate_channels(const Scenario& scenario, std::uint64_t seed,
                             ChannelDistribution distribution);

/// Reads a fixture file (see README for the JSON schema). Returns the
/// scenario, channels and precoders; when the file carries no precoders,
/// identity precoders scaled to the transmit budgets are returned.
std::tuple<Scenario, ChannelSet, Precoders> load_channels(
    const std::string& path);

void save_channels(const std::string& path, const Scenario& scenario,
                   const ChannelSet& channels, const Precoders* precoders);

/// Equivalent channel from TX tx to RX rx: H_{rx,tx} + G_rx^H R F_tx.
CMatrix equivalent_channel(const ChannelSet& ch, const RelayMatrix& relay,
                           int tx, int rx);

/// Stacks the colluding-eavesdropper view of user i's signal: the equivalent
/// channels H_{j,i} for all j != i in ascending j (M(K-1) x M), and the
/// concatenated relay-to-eavesdropper channels [G_j]_{j != i} (MN x M(K-1)).
std::pair<CMatrix, CMatrix> stack_eavesdroppers(const ChannelSet& ch,
                                                const RelayMatrix& relay,
                                                int user);

// Stacked whole-network matrices used by the relay reparameterization:
// direct channels as a K x K grid of M x M diagonal blocks (KM x KM), all
// uplink blocks side by side (NM x KM) and all downlink blocks (MN x KM).
CMatrix stacked_direct_matrix(const ChannelSet& ch);
CMatrix stacked_uplink_matrix(const ChannelSet& ch);
CMatrix stacked_downlink_matrix(const ChannelSet& ch);

}  // namespace iln
