// Serialization and file output: the JSON network/covariance schema (complex
// entries as [re, im] pairs, row-major), lossless decimal formatting for CSV,
// and atomic writes via a temporary file plus rename.  Readers validate
// shapes, reject non-finite numbers, and run the full network validator.

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "netopt/network.hpp"

namespace netopt {

using Json = nlohmann::ordered_json;

/// Shortest decimal that round-trips a double (17 significant digits).
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace detail {

inline double finite_number(const Json& j, const char* what) {
  if (!j.is_number())
    throw std::invalid_argument(std::string("parse: ") + what +
                                " must be a number");
  double v = j.get<double>();
  if (!std::isfinite(v))
    throw std::invalid_argument(std::string("parse: ") + what +
                                " must be finite");
  return v;
}

}  // namespace detail

inline Json cmat_to_json(const CMat& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < m.cols(); ++j)
      row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Parse a complex matrix of [re, im] pairs; dims checked when nonnegative.
inline CMat cmat_from_json(const Json& j, int rows = -1, int cols = -1,
                           const char* what = "matrix") {
  if (!j.is_array())
    throw std::invalid_argument(std::string("parse: ") + what +
                                " must be an array of rows");
  const int r = static_cast<int>(j.size());
  if (rows >= 0 && r != rows)
    throw std::invalid_argument(std::string("parse: ") + what +
                                " has the wrong row count");
  int c = cols;
  CMat m;
  for (int i = 0; i < r; ++i) {
    const Json& row = j[i];
    if (!row.is_array())
      throw std::invalid_argument(std::string("parse: ") + what +
                                  " rows must be arrays");
    if (c < 0) c = static_cast<int>(row.size());
    if (static_cast<int>(row.size()) != c)
      throw std::invalid_argument(std::string("parse: ") + what +
                                  " rows have inconsistent lengths");
    if (i == 0) m.resize(r, c);
    for (int k = 0; k < c; ++k) {
      const Json& e = row[k];
      if (!e.is_array() || e.size() != 2)
        throw std::invalid_argument(std::string("parse: ") + what +
                                    " entries must be [re, im] pairs");
      m(i, k) = cxd(detail::finite_number(e[0], what),
                    detail::finite_number(e[1], what));
    }
  }
  if (c < 0) c = 0;
  if (r == 0) m.resize(0, std::max(0, cols));
  return m;
}

inline Json network_to_json(const Network& net) {
  Json j;
  j["L"] = net.L;
  j["power"] = net.power;
  Json links = Json::array();
  for (int l = 0; l < net.L; ++l) {
    Json entry;
    entry["tx_group"] = net.tx_group.empty() ? l : net.tx_group[l];
    entry["rx_group"] = net.rx_group.empty() ? l : net.rx_group[l];
    entry["nt"] = net.nt[l];
    entry["nr"] = net.nr[l];
    links.push_back(std::move(entry));
  }
  j["links"] = std::move(links);
  j["weights"] = net.weights;
  Json phi = Json::array();
  for (int l = 0; l < net.L; ++l) {
    Json row = Json::array();
    for (int k = 0; k < net.L; ++k) row.push_back(net.phi(l, k));
    phi.push_back(std::move(row));
  }
  j["phi"] = std::move(phi);
  Json h = Json::array();
  for (int l = 0; l < net.L; ++l) {
    Json row = Json::array();
    for (int k = 0; k < net.L; ++k) row.push_back(cmat_to_json(net.H[l][k]));
    h.push_back(std::move(row));
  }
  j["H"] = std::move(h);
  if (!net.W.empty()) {
    Json w = Json::array();
    for (int l = 0; l < net.L; ++l) w.push_back(cmat_to_json(net.W[l]));
    j["W"] = std::move(w);
  }
  if (!net.What.empty()) {
    Json w = Json::array();
    for (int l = 0; l < net.L; ++l) w.push_back(cmat_to_json(net.What[l]));
    j["W_hat"] = std::move(w);
  }
  return j;
}

inline Network network_from_json(const Json& j) {
  if (!j.is_object()) throw std::invalid_argument("parse: expected an object");
  for (const char* key : {"L", "power", "links", "weights", "phi", "H"})
    if (!j.contains(key))
      throw std::invalid_argument(std::string("parse: missing field '") + key +
                                  "'");
  Network net;
  if (!j["L"].is_number_integer())
    throw std::invalid_argument("parse: L must be an integer");
  net.L = j["L"].get<int>();
  if (net.L <= 0) throw std::invalid_argument("parse: L must be positive");
  net.power = detail::finite_number(j["power"], "power");
  const Json& links = j["links"];
  if (!links.is_array() || static_cast<int>(links.size()) != net.L)
    throw std::invalid_argument("parse: links must have L entries");
  net.nt.resize(net.L);
  net.nr.resize(net.L);
  net.tx_group.resize(net.L);
  net.rx_group.resize(net.L);
  for (int l = 0; l < net.L; ++l) {
    const Json& e = links[l];
    for (const char* key : {"tx_group", "rx_group", "nt", "nr"})
      if (!e.contains(key) || !e[key].is_number_integer())
        throw std::invalid_argument(
            std::string("parse: links entries need integer '") + key + "'");
    net.tx_group[l] = e["tx_group"].get<int>();
    net.rx_group[l] = e["rx_group"].get<int>();
    net.nt[l] = e["nt"].get<int>();
    net.nr[l] = e["nr"].get<int>();
  }
  const Json& w = j["weights"];
  if (!w.is_array() || static_cast<int>(w.size()) != net.L)
    throw std::invalid_argument("parse: weights must have L entries");
  net.weights.resize(net.L);
  for (int l = 0; l < net.L; ++l)
    net.weights[l] = detail::finite_number(w[l], "weights");
  const Json& phi = j["phi"];
  if (!phi.is_array() || static_cast<int>(phi.size()) != net.L)
    throw std::invalid_argument("parse: phi must be L x L");
  net.phi.resize(net.L, net.L);
  for (int l = 0; l < net.L; ++l) {
    const Json& row = phi[l];
    if (!row.is_array() || static_cast<int>(row.size()) != net.L)
      throw std::invalid_argument("parse: phi must be L x L");
    for (int k = 0; k < net.L; ++k) {
      if (!row[k].is_number_integer())
        throw std::invalid_argument("parse: phi entries must be integers");
      net.phi(l, k) = row[k].get<int>();
    }
  }
  const Json& h = j["H"];
  if (!h.is_array() || static_cast<int>(h.size()) != net.L)
    throw std::invalid_argument("parse: H must be L x L");
  net.H.assign(net.L, std::vector<CMat>(net.L));
  for (int l = 0; l < net.L; ++l) {
    const Json& row = h[l];
    if (!row.is_array() || static_cast<int>(row.size()) != net.L)
      throw std::invalid_argument("parse: H must be L x L");
    for (int k = 0; k < net.L; ++k)
      net.H[l][k] = cmat_from_json(row[k], net.nr[l], net.nt[k], "H");
  }
  if (j.contains("W")) {
    const Json& arr = j["W"];
    if (!arr.is_array() || static_cast<int>(arr.size()) != net.L)
      throw std::invalid_argument("parse: W must have L entries");
    net.W.resize(net.L);
    for (int l = 0; l < net.L; ++l)
      net.W[l] = cmat_from_json(arr[l], net.nr[l], net.nr[l], "W");
  }
  if (j.contains("W_hat")) {
    const Json& arr = j["W_hat"];
    if (!arr.is_array() || static_cast<int>(arr.size()) != net.L)
      throw std::invalid_argument("parse: W_hat must have L entries");
    net.What.resize(net.L);
    for (int l = 0; l < net.L; ++l)
      net.What[l] = cmat_from_json(arr[l], net.nt[l], net.nt[l], "W_hat");
  }
  auto problems = validate_network(net);
  if (!problems.empty())
    throw std::invalid_argument("parse: " + problems.front());
  return net;
}

/// Covariance sets use {"covs": [matrix, ...]} with the same entry format.
inline Json covs_to_json(const std::vector<CMat>& covs) {
  Json j;
  Json arr = Json::array();
  for (const CMat& c : covs) arr.push_back(cmat_to_json(c));
  j["covs"] = std::move(arr);
  return j;
}

inline std::vector<CMat> covs_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("covs") || !j["covs"].is_array())
    throw std::invalid_argument("parse: expected {\"covs\": [...]}");
  std::vector<CMat> out;
  for (const Json& m : j["covs"]) out.push_back(cmat_from_json(m, -1, -1, "covs"));
  for (const CMat& c : out)
    if (c.rows() != c.cols())
      throw std::invalid_argument("parse: covariances must be square");
  return out;
}

/// Write the full text to a sibling temporary file, then rename into place,
/// so readers never observe a partial file.
inline void write_text_atomic(const std::filesystem::path& path,
                              const std::string& text) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw std::runtime_error("write: cannot open " + tmp.string());
    out << text;
    if (!out.flush())
      throw std::runtime_error("write: failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("read: cannot open " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const std::exception& e) {
    throw std::invalid_argument("read: " + path.string() + ": " + e.what());
  }
  return j;
}

}  // namespace netopt
