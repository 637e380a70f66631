#include "physlearn/io.hpp"

#include <string>

#include "physlearn/csv.hpp"
#include "physlearn/errors.hpp"

namespace physlearn::io {

namespace {

csv::Row numbered_header(const char* prefix, Eigen::Index n) {
  csv::Row h;
  for (Eigen::Index i = 0; i < n; ++i) h.push_back(prefix + std::to_string(i));
  return h;
}

Eigen::MatrixXd read_matrix(const std::filesystem::path& path) {
  const auto t = csv::read(path, true);
  if (t.rows.empty()) throw InputError(path.string() + ": no data rows");
  const auto cols = t.header.size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(t.rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const std::string where = path.string() + " row " + std::to_string(r + 1);
    if (t.rows[r].size() != cols) throw InputError(where + ": expected " + std::to_string(cols) + " fields");
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = csv::parse_double(t.rows[r][c], where);
    }
  }
  return m;
}

void write_matrix(const std::filesystem::path& path, const char* prefix, const Eigen::MatrixXd& m) {
  csv::Table t{numbered_header(prefix, m.cols()), {}};
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    csv::Row row;
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(csv::format_double(m(r, c)));
    t.rows.push_back(std::move(row));
  }
  csv::write(path, t);
}

}  // namespace

void write_dataset(const std::filesystem::path& path, const Dataset& data) {
  write_matrix(path, "s", data.as_columns().transpose());
}

Dataset read_dataset(const std::filesystem::path& path) {
  const Eigen::MatrixXd m = read_matrix(path);
  std::vector<Frame> frames;
  for (Eigen::Index r = 0; r < m.rows(); ++r) frames.emplace_back(Eigen::VectorXd(m.row(r).transpose()));
  return Dataset(std::move(frames));
}

void write_coder(const std::filesystem::path& path, const LinearCoder& coder) {
  write_matrix(path, "w", coder.weights());
}

LinearCoder read_coder(const std::filesystem::path& path, CoderRole role) {
  return LinearCoder(read_matrix(path), role);
}

void write_graph(const std::filesystem::path& nodes_path, const std::filesystem::path& edges_path,
                 const CircuitGraph& g) {
  csv::Table nodes{{"i", "C_F"}, {}};
  for (int i = 0; i < g.node_count(); ++i) {
    nodes.rows.push_back({std::to_string(i), csv::format_double(g.capacitance()[static_cast<std::size_t>(i)])});
  }
  csv::write(nodes_path, nodes);
  csv::Table edges{{"i", "j", "L_H", "R_ohm"}, {}};
  for (const auto& b : g.branches()) {
    edges.rows.push_back({std::to_string(b.a), std::to_string(b.b), csv::format_double(b.inductance),
                          csv::format_double(b.resistance)});
  }
  csv::write(edges_path, edges);
}

CircuitGraph read_graph(const std::filesystem::path& nodes_path, const std::filesystem::path& edges_path) {
  const auto nodes = csv::read(nodes_path, true);
  std::vector<double> caps(nodes.rows.size(), 0.0);
  std::vector<bool> seen(nodes.rows.size(), false);
  for (std::size_t r = 0; r < nodes.rows.size(); ++r) {
    const std::string where = nodes_path.string() + " row " + std::to_string(r + 1);
    if (nodes.rows[r].size() != 2) throw InputError(where + ": expected i,C_F");
    const long long i = csv::parse_int(nodes.rows[r][0], where);
    if (i < 0 || i >= static_cast<long long>(caps.size()) || seen[static_cast<std::size_t>(i)]) {
      throw InputError(where + ": node ids must be 0..V-1 without repeats");
    }
    seen[static_cast<std::size_t>(i)] = true;
    caps[static_cast<std::size_t>(i)] = csv::parse_double(nodes.rows[r][1], where);
  }
  const auto edges = csv::read(edges_path, true);
  std::vector<Branch> branches;
  for (std::size_t r = 0; r < edges.rows.size(); ++r) {
    const std::string where = edges_path.string() + " row " + std::to_string(r + 1);
    const auto& row = edges.rows[r];
    if (row.size() != 4) throw InputError(where + ": expected i,j,L_H,R_ohm");
    branches.push_back({static_cast<int>(csv::parse_int(row[0], where)), static_cast<int>(csv::parse_int(row[1], where)),
                        csv::parse_double(row[2], where), csv::parse_double(row[3], where)});
  }
  return CircuitGraph(std::move(caps), std::move(branches));
}

}  // namespace physlearn::io
