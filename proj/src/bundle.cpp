#include "sera/bundle.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sera {

static_assert(std::endian::native == std::endian::little,
              "bundle serialization assumes a little-endian host");

namespace {

[[noreturn]] void fail(const std::filesystem::path& p, const std::string& why) {
  throw std::runtime_error(p.string() + ": " + why);
}

std::ifstream open_in(const std::filesystem::path& p, std::ios::openmode mode = std::ios::in) {
  std::ifstream f(p, mode);
  if (!f) fail(p, "cannot open");
  return f;
}

std::ofstream open_out(const std::filesystem::path& p, std::ios::openmode mode = std::ios::out) {
  std::ofstream f(p, mode);
  if (!f) fail(p, "cannot open for writing");
  return f;
}

std::vector<uint32_t> read_id_list(const std::filesystem::path& p, uint32_t n) {
  auto f = open_in(p);
  std::vector<uint32_t> ids;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    ids.push_back(static_cast<uint32_t>(std::stoul(line)));
  }
  NodeSubset::checked(ids, n);  // validates; throws on disorder/range
  return ids;
}

void write_id_list(const std::filesystem::path& p, const NodeSubset& s) {
  auto f = open_out(p);
  for (uint32_t id : s.ids) f << id << '\n';
}

void write_f32(std::ostream& os, const std::vector<double>& values) {
  constexpr std::size_t kChunk = 1 << 16;
  std::vector<float> buf;
  for (std::size_t i = 0; i < values.size(); i += kChunk) {
    const std::size_t m = std::min(kChunk, values.size() - i);
    buf.resize(m);
    for (std::size_t j = 0; j < m; ++j) buf[j] = static_cast<float>(values[i + j]);
    os.write(reinterpret_cast<const char*>(buf.data()), m * sizeof(float));
  }
}

void read_f32(std::istream& is, std::vector<double>& values, const std::filesystem::path& p) {
  constexpr std::size_t kChunk = 1 << 16;
  std::vector<float> buf;
  for (std::size_t i = 0; i < values.size(); i += kChunk) {
    const std::size_t m = std::min(kChunk, values.size() - i);
    buf.resize(m);
    is.read(reinterpret_cast<char*>(buf.data()), m * sizeof(float));
    if (!is) fail(p, "truncated float32 payload");
    for (std::size_t j = 0; j < m; ++j) values[i + j] = buf[j];
  }
}

}  // namespace

DatasetBundle load_bundle(const std::filesystem::path& dir) {
  DatasetBundle b;
  uint32_t n = 0, d = 0;
  {
    auto f = open_in(dir / "meta.txt");
    std::string line;
    while (std::getline(f, line)) {
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) fail(dir / "meta.txt", "expected key=value, got: " + line);
      const std::string key = line.substr(0, eq);
      const long value = std::stol(line.substr(eq + 1));
      if (key == "n") n = static_cast<uint32_t>(value);
      else if (key == "d") d = static_cast<uint32_t>(value);
      else if (key == "classes") b.classes = static_cast<int32_t>(value);
      else fail(dir / "meta.txt", "unknown key: " + key);
    }
    if (n == 0 || d == 0 || b.classes <= 0) fail(dir / "meta.txt", "missing n, d or classes");
  }
  {
    auto f = open_in(dir / "edges.tsv");
    std::vector<std::pair<uint32_t, uint32_t>> edges;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(f, line)) {
      ++lineno;
      if (line.empty()) continue;
      std::istringstream ss(line);
      long u, v;
      if (!(ss >> u >> v) || u < 0 || v < 0)
        fail(dir / "edges.tsv", "malformed line " + std::to_string(lineno) + ": " + line);
      edges.emplace_back(static_cast<uint32_t>(u), static_cast<uint32_t>(v));
    }
    b.graph = Graph::from_edges(n, edges, &b.duplicate_edges);
  }
  {
    const auto p = dir / "features.bin";
    auto f = open_in(p, std::ios::binary);
    const auto bytes = std::filesystem::file_size(p);
    if (bytes != std::size_t(n) * d * sizeof(float))
      fail(p, "size " + std::to_string(bytes) + " != n*d*4 = " +
                  std::to_string(std::size_t(n) * d * sizeof(float)));
    b.features = DenseMatrix(n, d);
    read_f32(f, b.features.data(), p);
    if (!b.features.all_finite()) fail(p, "non-finite feature value");
  }
  {
    auto f = open_in(dir / "labels.tsv");
    std::string line;
    while (std::getline(f, line)) {
      if (line.empty()) continue;
      const long y = std::stol(line);
      if (y < 0 || y >= b.classes)
        fail(dir / "labels.tsv", "label " + std::to_string(y) + " outside [0, classes)");
      b.labels.push_back(static_cast<int32_t>(y));
    }
    if (b.labels.size() != n)
      fail(dir / "labels.tsv", "expected " + std::to_string(n) + " labels, got " +
                                   std::to_string(b.labels.size()));
  }
  b.train_mask = NodeSubset{read_id_list(dir / "mask_train.tsv", n)};
  b.test_mask = NodeSubset{read_id_list(dir / "mask_test.tsv", n)};
  if (std::filesystem::exists(dir / "mask_val.tsv"))
    b.val_mask = NodeSubset{read_id_list(dir / "mask_val.tsv", n)};
  {
    std::vector<bool> in_train(n, false);
    for (uint32_t id : b.train_mask.ids) in_train[id] = true;
    for (uint32_t id : b.test_mask.ids)
      if (in_train[id]) fail(dir, "train and test masks overlap at node " + std::to_string(id));
  }
  return b;
}

void save_bundle(const DatasetBundle& b, const std::filesystem::path& dir) {
  const uint32_t n = b.graph.num_nodes();
  if (b.features.rows() != n || b.labels.size() != n)
    throw std::invalid_argument("bundle pieces disagree on node count");
  std::filesystem::create_directories(dir);
  {
    auto f = open_out(dir / "meta.txt");
    f << "n=" << n << "\nd=" << b.features.cols() << "\nclasses=" << b.classes << "\n";
  }
  {
    auto f = open_out(dir / "edges.tsv");
    b.graph.for_each_edge([&](uint32_t u, uint32_t v) { f << u << '\t' << v << '\n'; });
  }
  {
    auto f = open_out(dir / "features.bin", std::ios::binary);
    write_f32(f, b.features.data());
  }
  {
    auto f = open_out(dir / "labels.tsv");
    for (int32_t y : b.labels) f << y << '\n';
  }
  write_id_list(dir / "mask_train.tsv", b.train_mask);
  write_id_list(dir / "mask_test.tsv", b.test_mask);
  if (!b.val_mask.empty()) write_id_list(dir / "mask_val.tsv", b.val_mask);
}

void write_matrix_section(std::ostream& os, const std::string& name, const DenseMatrix& m) {
  os << "matrix " << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
  write_f32(os, m.data());
}

DenseMatrix read_matrix_section(std::istream& is, std::string* name) {
  std::string header;
  if (!std::getline(is, header))
    throw std::runtime_error("matrix section: missing header line");
  std::istringstream ss(header);
  std::string tag, nm;
  std::size_t rows, cols;
  if (!(ss >> tag >> nm >> rows >> cols) || tag != "matrix")
    throw std::runtime_error("matrix section: bad header: " + header);
  if (name) *name = nm;
  DenseMatrix m(rows, cols);
  read_f32(is, m.data(), "matrix section");
  return m;
}

void save_matrix(const std::filesystem::path& file, const std::string& name,
                 const DenseMatrix& m) {
  auto f = open_out(file, std::ios::binary);
  write_matrix_section(f, name, m);
}

DenseMatrix load_matrix(const std::filesystem::path& file, std::string* name) {
  auto f = open_in(file, std::ios::binary);
  try {
    return read_matrix_section(f, name);
  } catch (const std::exception& e) {
    fail(file, e.what());
  }
}

}  // namespace sera
