#include "iln/channel.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>
#include <utility>

#include <json.hpp>

namespace iln {

using nlohmann::json;

Scenario Scenario::make(int users, int subcarriers, int antennas,
                        double tx_budget, double relay_budget) {
  Scenario s;
  s.num_users = users;
  s.num_subcarriers = subcarriers;
  s.relay_antennas = antennas;
  s.tx_power_budget.assign(users, tx_budget);
  s.relay_power_budget = relay_budget;
  s.streams.assign(users, subcarriers);
  return s;
}

void Scenario::validate() const {
  if (num_users < 2) throw std::invalid_argument("scenario: need K >= 2 users");
  if (num_subcarriers < 1) {
    throw std::invalid_argument("scenario: need M >= 1 subcarriers");
  }
  if (relay_antennas < 1) {
    throw std::invalid_argument("scenario: need N >= 1 relay antennas");
  }
  if (static_cast<int>(tx_power_budget.size()) != num_users) {
    throw std::invalid_argument("scenario: one TX power budget per user");
  }
  for (double p : tx_power_budget) {
    if (!(p > 0)) throw std::invalid_argument("scenario: TX budgets must be > 0");
  }
  if (!(relay_power_budget > 0)) {
    throw std::invalid_argument("scenario: relay budget must be > 0");
  }
  if (!streams.empty()) {
    if (static_cast<int>(streams.size()) != num_users) {
      throw std::invalid_argument("scenario: one stream count per user");
    }
    for (int s : streams) {
      if (s < 0 || s > num_subcarriers) {
        throw std::invalid_argument("scenario: need 0 <= S_i <= M");
      }
    }
  }
}

const char* to_string(ChannelDistribution d) {
  return d == ChannelDistribution::Uniform01 ? "uniform01" : "cgauss";
}

ChannelDistribution distribution_from_string(const std::string& s) {
  if (s == "uniform01") return ChannelDistribution::Uniform01;
  if (s == "cgauss" || s == "complex_gaussian") {
    return ChannelDistribution::ComplexGaussian;
  }
  throw std::invalid_argument("unknown channel distribution: " + s);
}

ChannelSet::ChannelSet(int num_users, int num_subcarriers, int relay_antennas)
    : users_(num_users),
      subcarriers_(num_subcarriers),
      antennas_(relay_antennas),
      direct_(static_cast<size_t>(num_users) * num_users * num_subcarriers),
      uplink_(static_cast<size_t>(num_users) * num_subcarriers,
              CVector::Zero(relay_antennas)),
      downlink_(static_cast<size_t>(num_users) * num_subcarriers,
                CVector::Zero(relay_antennas)) {}

Complex ChannelSet::direct(int rx, int tx, int m) const {
  return direct_[(static_cast<size_t>(rx) * users_ + tx) * subcarriers_ + m];
}

const CVector& ChannelSet::uplink(int tx, int m) const {
  return uplink_[static_cast<size_t>(tx) * subcarriers_ + m];
}

const CVector& ChannelSet::downlink(int rx, int m) const {
  return downlink_[static_cast<size_t>(rx) * subcarriers_ + m];
}

void ChannelSet::set_direct(int rx, int tx, int m, Complex value) {
  direct_[(static_cast<size_t>(rx) * users_ + tx) * subcarriers_ + m] = value;
}

void ChannelSet::set_uplink(int tx, int m, CVector value) {
  if (value.size() != antennas_) {
    throw std::invalid_argument("uplink vector has wrong antenna count");
  }
  uplink_[static_cast<size_t>(tx) * subcarriers_ + m] = std::move(value);
}

void ChannelSet::set_downlink(int rx, int m, CVector value) {
  if (value.size() != antennas_) {
    throw std::invalid_argument("downlink vector has wrong antenna count");
  }
  downlink_[static_cast<size_t>(rx) * subcarriers_ + m] = std::move(value);
}

CMatrix ChannelSet::direct_matrix(int rx, int tx) const {
  CMatrix h = CMatrix::Zero(subcarriers_, subcarriers_);
  for (int m = 0; m < subcarriers_; ++m) h(m, m) = direct(rx, tx, m);
  return h;
}

CMatrix ChannelSet::uplink_matrix(int tx) const {
  CMatrix f = CMatrix::Zero(antennas_ * subcarriers_, subcarriers_);
  for (int m = 0; m < subcarriers_; ++m) {
    f.block(m * antennas_, m, antennas_, 1) = uplink(tx, m);
  }
  return f;
}

CMatrix ChannelSet::downlink_matrix(int rx) const {
  CMatrix g = CMatrix::Zero(subcarriers_ * antennas_, subcarriers_);
  for (int m = 0; m < subcarriers_; ++m) {
    g.block(m * antennas_, m, antennas_, 1) = downlink(rx, m);
  }
  return g;
}

Precoders Precoders::from_matrices(std::vector<CMatrix> mats) {
  Precoders p;
  p.active_columns.resize(mats.size());
  for (size_t i = 0; i < mats.size(); ++i) {
    if (mats[i].rows() != mats[i].cols()) {
      throw std::invalid_argument("precoder matrices must be square");
    }
    for (Index c = 0; c < mats[i].cols(); ++c) {
      if (mats[i].col(c).norm() > 0.0) {
        p.active_columns[i].push_back(static_cast<int>(c));
      }
    }
  }
  p.matrices = std::move(mats);
  return p;
}

int Precoders::streams(int user) const {
  return static_cast<int>(active_columns[user].size());
}

CMatrix Precoders::compact(int user) const {
  const CMatrix& full = matrices[user];
  CMatrix out(full.rows(), streams(user));
  for (int k = 0; k < streams(user); ++k) {
    out.col(k) = full.col(active_columns[user][k]);
  }
  return out;
}

double Precoders::power(int user) const {
  return matrices[user].squaredNorm();
}

CMatrix Precoders::block_diagonal() const {
  return block_diag(matrices);
}

RelayMatrix RelayMatrix::zero(int subcarriers, int antennas) {
  RelayMatrix r;
  r.matrix = CMatrix::Zero(subcarriers * antennas, subcarriers * antennas);
  r.antennas = antennas;
  r.structure_tag = RelayStructure::Zero;
  return r;
}

RelayMatrix RelayMatrix::scaled_identity(int subcarriers, int antennas,
                                         double scale) {
  RelayMatrix r;
  r.matrix = scale * CMatrix::Identity(subcarriers * antennas,
                                       subcarriers * antennas);
  r.antennas = antennas;
  r.structure_tag = RelayStructure::ScaledIdentity;
  return r;
}

RelayMatrix RelayMatrix::from_frequency_blocks(
    const std::vector<CMatrix>& blocks, int antennas) {
  for (const CMatrix& b : blocks) {
    if (b.rows() != antennas || b.cols() != antennas) {
      throw std::invalid_argument("frequency blocks must be N x N");
    }
  }
  RelayMatrix r;
  r.matrix = block_diag(blocks);
  r.antennas = antennas;
  r.structure_tag = RelayStructure::BlockDiagonal;
  return r;
}

RelayMatrix RelayMatrix::general(CMatrix m, int antennas) {
  if (m.rows() != m.cols() || m.rows() % antennas != 0) {
    throw std::invalid_argument("relay matrix must be square MN x MN");
  }
  RelayMatrix r;
  r.matrix = std::move(m);
  r.antennas = antennas;
  r.structure_tag = RelayStructure::General;
  return r;
}

CMatrix RelayMatrix::block(int to_subcarrier, int from_subcarrier) const {
  return matrix.block(to_subcarrier * antennas, from_subcarrier * antennas,
                      antennas, antennas);
}

namespace {

// Deterministic draws independent of the standard library's distribution
// implementations: identical output for identical seeds on any platform.
class ChannelRng {
 public:
  explicit ChannelRng(std::uint64_t seed) : gen_(seed) {}

  double uniform01() { return (gen_() >> 11) * 0x1.0p-53; }  // [0, 1)

  Complex draw(ChannelDistribution d) {
    if (d == ChannelDistribution::Uniform01) {
      const double re = uniform01();
      const double im = uniform01();
      return {re, im};
    }
    // Circularly symmetric complex Gaussian with unit variance.
    const double u1 = 1.0 - uniform01();  // (0, 1]
    const double u2 = uniform01();
    const double radius = std::sqrt(-std::log(u1));
    return std::polar(radius, 2.0 * M_PI * u2);
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace

ChannelSet generate_channels(const Scenario& scenario, std::uint64_t seed,
                             ChannelDistribution distribution) {
  scenario.validate();
  const int K = scenario.num_users;
  const int M = scenario.num_subcarriers;
  const int N = scenario.relay_antennas;
  ChannelSet ch(K, M, N);
  ChannelRng rng(seed);
  for (int rx = 0; rx < K; ++rx) {
    for (int tx = 0; tx < K; ++tx) {
      for (int m = 0; m < M; ++m) {
        ch.set_direct(rx, tx, m, rng.draw(distribution));
      }
    }
  }
  for (int tx = 0; tx < K; ++tx) {
    for (int m = 0; m < M; ++m) {
      CVector f(N);
      for (int a = 0; a < N; ++a) f(a) = rng.draw(distribution);
      ch.set_uplink(tx, m, std::move(f));
    }
  }
  for (int rx = 0; rx < K; ++rx) {
    for (int m = 0; m < M; ++m) {
      CVector g(N);
      for (int a = 0; a < N; ++a) g(a) = rng.draw(distribution);
      ch.set_downlink(rx, m, std::move(g));
    }
  }
  return ch;
}

namespace {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

Complex parse_complex(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() ||
      !j[1].is_number()) {
    throw std::runtime_error("fixture: malformed complex literal at " + where +
                             " (expected [re, im])");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

json dump_complex(Complex z) { return json::array({z.real(), z.imag()}); }

const json& field(const json& j, const char* name, const std::string& where) {
  auto it = j.find(name);
  if (it == j.end()) {
    throw std::runtime_error("fixture: missing field " + where + "." + name);
  }
  return *it;
}

}  // namespace

std::tuple<Scenario, ChannelSet, Precoders> load_channels(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("fixture: cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error("fixture: " + path + ": " + e.what());
  }

  const json& sc = field(j, "scenario", "$");
  Scenario scenario;
  scenario.num_users = field(sc, "K", "scenario").get<int>();
  scenario.num_subcarriers = field(sc, "M", "scenario").get<int>();
  scenario.relay_antennas = field(sc, "N", "scenario").get<int>();
  for (const json& db : field(sc, "P_tx_db", "scenario")) {
    scenario.tx_power_budget.push_back(db_to_linear(db.get<double>()));
  }
  scenario.relay_power_budget =
      db_to_linear(field(sc, "P_relay_db", "scenario").get<double>());
  const int K = scenario.num_users;
  const int M = scenario.num_subcarriers;
  const int N = scenario.relay_antennas;

  const json& chj = field(j, "channels", "$");
  const json& hj = field(chj, "H", "channels");
  const json& fj = field(chj, "F", "channels");
  const json& gj = field(chj, "G", "channels");
  if (static_cast<int>(hj.size()) != K || static_cast<int>(fj.size()) != K ||
      static_cast<int>(gj.size()) != K) {
    throw std::runtime_error("fixture: channel arrays must have K entries");
  }

  ChannelSet ch(K, M, N);
  for (int rx = 0; rx < K; ++rx) {
    if (static_cast<int>(hj[rx].size()) != K) {
      throw std::runtime_error("fixture: H rows must have K entries");
    }
    for (int tx = 0; tx < K; ++tx) {
      const json& diag = hj[rx][tx];
      if (static_cast<int>(diag.size()) != M) {
        throw std::runtime_error("fixture: H diagonals must have M entries");
      }
      for (int m = 0; m < M; ++m) {
        const std::string where = "channels.H[" + std::to_string(rx) + "][" +
                                  std::to_string(tx) + "][" +
                                  std::to_string(m) + "]";
        ch.set_direct(rx, tx, m, parse_complex(diag[m], where));
      }
    }
  }
  auto load_vectors = [&](const json& src, const char* name, auto&& setter) {
    for (int u = 0; u < K; ++u) {
      if (static_cast<int>(src[u].size()) != M) {
        throw std::runtime_error(std::string("fixture: ") + name +
                                 " entries must have M subcarriers");
      }
      for (int m = 0; m < M; ++m) {
        const json& vc = src[u][m];
        if (static_cast<int>(vc.size()) != N) {
          throw std::runtime_error(std::string("fixture: ") + name +
                                   " vectors must have N entries");
        }
        CVector v(N);
        for (int a = 0; a < N; ++a) {
          const std::string where = std::string("channels.") + name + "[" +
                                    std::to_string(u) + "][" +
                                    std::to_string(m) + "][" +
                                    std::to_string(a) + "]";
          v(a) = parse_complex(vc[a], where);
        }
        setter(u, m, std::move(v));
      }
    }
  };
  load_vectors(fj, "F", [&](int u, int m, CVector v) {
    ch.set_uplink(u, m, std::move(v));
  });
  load_vectors(gj, "G", [&](int u, int m, CVector v) {
    ch.set_downlink(u, m, std::move(v));
  });

  std::vector<CMatrix> mats;
  if (j.contains("precoders")) {
    const json& pj = j["precoders"];
    if (static_cast<int>(pj.size()) != K) {
      throw std::runtime_error("fixture: precoders must have K entries");
    }
    for (int u = 0; u < K; ++u) {
      CMatrix p(M, M);
      if (static_cast<int>(pj[u].size()) != M) {
        throw std::runtime_error("fixture: precoders must be M x M");
      }
      for (int r = 0; r < M; ++r) {
        if (static_cast<int>(pj[u][r].size()) != M) {
          throw std::runtime_error("fixture: precoders must be M x M");
        }
        for (int c = 0; c < M; ++c) {
          const std::string where = "precoders[" + std::to_string(u) + "][" +
                                    std::to_string(r) + "][" +
                                    std::to_string(c) + "]";
          p(r, c) = parse_complex(pj[u][r][c], where);
        }
      }
      mats.push_back(std::move(p));
    }
  } else {
    for (int u = 0; u < K; ++u) {
      mats.push_back(std::sqrt(scenario.tx_power_budget[u] / M) *
                     CMatrix::Identity(M, M));
    }
  }
  Precoders precoders = Precoders::from_matrices(std::move(mats));
  for (int u = 0; u < K; ++u) {
    if (precoders.power(u) > scenario.tx_power_budget[u] + 1e-9) {
      throw std::runtime_error("fixture: precoder " + std::to_string(u) +
                               " exceeds its transmit power budget");
    }
    scenario.streams.push_back(precoders.streams(u));
  }
  scenario.validate();
  return {std::move(scenario), std::move(ch), std::move(precoders)};
}

void save_channels(const std::string& path, const Scenario& scenario,
                   const ChannelSet& channels, const Precoders* precoders) {
  const int K = scenario.num_users;
  const int M = scenario.num_subcarriers;
  const int N = scenario.relay_antennas;
  json j;
  json tx_db = json::array();
  for (double p : scenario.tx_power_budget) tx_db.push_back(linear_to_db(p));
  j["scenario"] = {{"K", K},
                   {"M", M},
                   {"N", N},
                   {"P_tx_db", tx_db},
                   {"P_relay_db", linear_to_db(scenario.relay_power_budget)}};

  json hj = json::array();
  for (int rx = 0; rx < K; ++rx) {
    json row = json::array();
    for (int tx = 0; tx < K; ++tx) {
      json diag = json::array();
      for (int m = 0; m < M; ++m) {
        diag.push_back(dump_complex(channels.direct(rx, tx, m)));
      }
      row.push_back(std::move(diag));
    }
    hj.push_back(std::move(row));
  }
  auto dump_vectors = [&](auto&& getter) {
    json out = json::array();
    for (int u = 0; u < K; ++u) {
      json per_user = json::array();
      for (int m = 0; m < M; ++m) {
        const CVector& v = getter(u, m);
        json vc = json::array();
        for (int a = 0; a < N; ++a) vc.push_back(dump_complex(v(a)));
        per_user.push_back(std::move(vc));
      }
      out.push_back(std::move(per_user));
    }
    return out;
  };
  j["channels"] = {
      {"H", std::move(hj)},
      {"F", dump_vectors([&](int u, int m) -> const CVector& {
         return channels.uplink(u, m);
       })},
      {"G", dump_vectors([&](int u, int m) -> const CVector& {
         return channels.downlink(u, m);
       })}};

  if (precoders != nullptr) {
    json pj = json::array();
    for (int u = 0; u < K; ++u) {
      json mat = json::array();
      for (int r = 0; r < M; ++r) {
        json row = json::array();
        for (int c = 0; c < M; ++c) {
          row.push_back(dump_complex(precoders->matrices[u](r, c)));
        }
        mat.push_back(std::move(row));
      }
      pj.push_back(std::move(mat));
    }
    j["precoders"] = std::move(pj);
  }

  std::ofstream out(path);
  if (!out) throw std::runtime_error("fixture: cannot write " + path);
  out << j.dump(1) << "\n";
}

CMatrix equivalent_channel(const ChannelSet& ch, const RelayMatrix& relay,
                           int tx, int rx) {
  const int M = ch.num_subcarriers();
  CMatrix out = CMatrix::Zero(M, M);
  for (int f = 0; f < M; ++f) {
    for (int m = 0; m < M; ++m) {
      Complex v = f == m ? ch.direct(rx, tx, m) : Complex{0.0, 0.0};
      v += (ch.downlink(rx, f).adjoint() * relay.block(f, m) *
            ch.uplink(tx, m))(0, 0);
      out(f, m) = v;
    }
  }
  return out;
}

std::pair<CMatrix, CMatrix> stack_eavesdroppers(const ChannelSet& ch,
                                                const RelayMatrix& relay,
                                                int user) {
  const int K = ch.num_users();
  const int M = ch.num_subcarriers();
  const int MN = ch.relay_dim();
  if (K < 2) throw std::invalid_argument("stack_eavesdroppers: need K >= 2");
  CMatrix hbar(M * (K - 1), M);
  CMatrix g(MN, M * (K - 1));
  int slot = 0;
  for (int j = 0; j < K; ++j) {
    if (j == user) continue;
    hbar.block(slot * M, 0, M, M) = equivalent_channel(ch, relay, user, j);
    g.block(0, slot * M, MN, M) = ch.downlink_matrix(j);
    ++slot;
  }
  return {std::move(hbar), std::move(g)};
}

CMatrix stacked_direct_matrix(const ChannelSet& ch) {
  const int K = ch.num_users();
  const int M = ch.num_subcarriers();
  CMatrix h = CMatrix::Zero(K * M, K * M);
  for (int rx = 0; rx < K; ++rx) {
    for (int tx = 0; tx < K; ++tx) {
      for (int m = 0; m < M; ++m) {
        h(rx * M + m, tx * M + m) = ch.direct(rx, tx, m);
      }
    }
  }
  return h;
}

CMatrix stacked_uplink_matrix(const ChannelSet& ch) {
  const int K = ch.num_users();
  const int M = ch.num_subcarriers();
  const int N = ch.relay_antennas();
  CMatrix f = CMatrix::Zero(N * M, K * M);
  for (int tx = 0; tx < K; ++tx) {
    f.block(0, tx * M, N * M, M) = ch.uplink_matrix(tx);
  }
  return f;
}

CMatrix stacked_downlink_matrix(const ChannelSet& ch) {
  const int K = ch.num_users();
  const int M = ch.num_subcarriers();
  const int N = ch.relay_antennas();
  CMatrix g = CMatrix::Zero(M * N, K * M);
  for (int rx = 0; rx < K; ++rx) {
    g.block(0, rx * M, M * N, M) = ch.downlink_matrix(rx);
  }
  return g;
}

}  // namespace iln
