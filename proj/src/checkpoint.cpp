/* Copyright 2026 The t2v Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "t2v/checkpoint.hpp"

#include <bit>
#include <fstream>
#include <sstream>

namespace t2v {

namespace {

constexpr std::string_view kMagic = "t2v-checkpoint";

void put_f32(std::ostream& out, double value) {
  const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(value));
  const char bytes[4] = {static_cast<char>(bits & 0xFF), static_cast<char>((bits >> 8) & 0xFF),
                         static_cast<char>((bits >> 16) & 0xFF),
                         static_cast<char>((bits >> 24) & 0xFF)};
  out.write(bytes, 4);
}

double get_f32(const unsigned char* b) {
  const std::uint32_t bits = static_cast<std::uint32_t>(b[0]) |
                             (static_cast<std::uint32_t>(b[1]) << 8) |
                             (static_cast<std::uint32_t>(b[2]) << 16) |
                             (static_cast<std::uint32_t>(b[3]) << 24);
  return static_cast<double>(std::bit_cast<float>(bits));
}

std::string read_line(std::istream& in, const char* what) {
  std::string line;
  if (!std::getline(in, line)) {
    throw CheckpointError(std::string("checkpoint truncated while reading ") + what);
  }
  return line;
}

// "<key> <value>" with an exact key.
std::string expect_field(std::istream& in, std::string_view key) {
  const std::string line = read_line(in, std::string(key).c_str());
  if (line.size() <= key.size() || line.compare(0, key.size(), key) != 0 ||
      line[key.size()] != ' ') {
    throw CheckpointError("expected checkpoint field '" + std::string(key) + "', got '" + line +
                          "'");
  }
  return line.substr(key.size() + 1);
}

std::size_t parse_size(const std::string& s, std::string_view key) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size() || s.empty()) {
    throw CheckpointError("checkpoint field '" + std::string(key) + "' is not a number: " + s);
  }
  return static_cast<std::size_t>(v);
}

void write_string_record(std::ostream& out, std::string_view tag, const std::string& value) {
  out << tag << ' ' << value.size() << ' ' << value << '\n';
}

std::string read_string_record(std::istream& in, std::string_view tag) {
  std::string word;
  std::size_t length = 0;
  if (!(in >> word) || word != tag || !(in >> length) || in.get() != ' ') {
    throw CheckpointError("malformed '" + std::string(tag) + "' record in checkpoint");
  }
  std::string value(length, '\0');
  if (!in.read(value.data(), static_cast<std::streamsize>(length)) || in.get() != '\n') {
    throw CheckpointError("truncated '" + std::string(tag) + "' record in checkpoint");
  }
  return value;
}

}  // namespace

void write_checkpoint(std::ostream& out, const Checkpoint& ck) {
  const ModelParams& p = ck.model.params;
  const ModelDims d = p.dims();
  if (ck.model.symbols.size() != d.symbols) {
    throw CheckpointError("symbol table does not match embedding rows");
  }
  if (ck.model.labels.size() != d.labels) {
    throw CheckpointError("label table does not match softmax rows");
  }
  out << kMagic << ' ' << kCheckpointVersion << '\n'
      << "kind " << to_string(ck.model.kind()) << '\n'
      << "d_c " << d.input_dim << '\n'
      << "d_h " << d.hidden_dim << '\n'
      << "d_t " << d.output_dim << '\n'
      << "symbols " << d.symbols << '\n'
      << "labels " << d.labels << '\n'
      << "prng " << ck.prng << '\n'
      << "seed " << ck.seed << '\n';
  for (const auto& [key, value] : ck.config) {
    if (key.find_first_of("=\n") != std::string::npos || value.find('\n') != std::string::npos) {
      throw CheckpointError("config entry '" + key + "' cannot be stored");
    }
    out << "config " << key << '=' << value << '\n';
  }
  out << "end-header\n";
  for (const auto& s : ck.model.symbols.symbol_strings()) write_string_record(out, "symbol", s);
  for (const auto& l : ck.model.labels) write_string_record(out, "label", l);
  const auto tensors = p.tensors();
  const auto& names = ModelParams::tensor_names();
  for (std::size_t k = 0; k < tensors.size(); ++k) {
    out << "tensor " << names[k] << ' ' << tensors[k]->rows() << ' ' << tensors[k]->cols()
        << '\n';
    for (double v : tensors[k]->data()) put_f32(out, v);
    out << '\n';
  }
  if (!out) throw CheckpointError("failed to write checkpoint");
}

Checkpoint read_checkpoint(std::istream& in) {
  const std::string magic = read_line(in, "magic");
  if (magic != std::string(kMagic) + " " + std::to_string(kCheckpointVersion)) {
    throw CheckpointError("not a version " + std::to_string(kCheckpointVersion) +
                          " checkpoint (header '" + magic + "')");
  }
  Checkpoint ck;
  ModelKind kind;
  try {
    kind = parse_model_kind(expect_field(in, "kind"));
  } catch (const std::invalid_argument& e) {
    throw CheckpointError(e.what());
  }
  ModelDims d;
  d.input_dim = parse_size(expect_field(in, "d_c"), "d_c");
  d.hidden_dim = parse_size(expect_field(in, "d_h"), "d_h");
  d.output_dim = parse_size(expect_field(in, "d_t"), "d_t");
  d.symbols = parse_size(expect_field(in, "symbols"), "symbols");
  d.labels = parse_size(expect_field(in, "labels"), "labels");
  ck.prng = expect_field(in, "prng");
  ck.seed = parse_size(expect_field(in, "seed"), "seed");
  while (true) {
    const std::string line = read_line(in, "header");
    if (line == "end-header") break;
    if (!line.starts_with("config ")) throw CheckpointError("unexpected header line '" + line + "'");
    const std::string entry = line.substr(7);
    const std::size_t eq = entry.find('=');
    if (eq == std::string::npos) throw CheckpointError("config entry without '=': " + entry);
    ck.config.emplace_back(entry.substr(0, eq), entry.substr(eq + 1));
  }
  if (d.symbols < kReservedSymbols) throw CheckpointError("symbol table too small");

  std::vector<std::string> symbols;
  for (std::size_t i = kReservedSymbols; i < d.symbols; ++i) {
    symbols.push_back(read_string_record(in, "symbol"));
  }
  try {
    ck.model.symbols = SymbolTable::from_symbol_strings(kind, std::move(symbols));
  } catch (const std::invalid_argument& e) {
    throw CheckpointError(e.what());
  }
  for (std::size_t i = 0; i < d.labels; ++i) ck.model.labels.push_back(read_string_record(in, "label"));

  try {
    ck.model.params = ModelParams::zeros(d);
  } catch (const ShapeError& e) {
    throw CheckpointError(std::string("inconsistent checkpoint dimensions: ") + e.what());
  }
  const auto tensors = ck.model.params.tensors();
  const auto& names = ModelParams::tensor_names();
  std::vector<unsigned char> buffer;
  for (std::size_t k = 0; k < tensors.size(); ++k) {
    const std::string line = read_line(in, "tensor header");
    std::istringstream hs(line);
    std::string tag, name;
    std::size_t rows = 0, cols = 0;
    if (!(hs >> tag >> name >> rows >> cols) || tag != "tensor" || name != names[k]) {
      throw CheckpointError("expected tensor '" + names[k] + "', got '" + line + "'");
    }
    if (rows != tensors[k]->rows() || cols != tensors[k]->cols()) {
      throw CheckpointError("tensor " + name + " has shape " + std::to_string(rows) + "x" +
                            std::to_string(cols) + ", expected " + tensors[k]->shape_string());
    }
    buffer.resize(4 * rows * cols);
    if (!in.read(reinterpret_cast<char*>(buffer.data()),
                 static_cast<std::streamsize>(buffer.size())) ||
        in.get() != '\n') {
      throw CheckpointError("truncated payload for tensor " + name);
    }
    auto data = tensors[k]->data();
    for (std::size_t i = 0; i < data.size(); ++i) data[i] = get_f32(&buffer[4 * i]);
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw CheckpointError("trailing bytes after the last tensor");
  }
  return ck;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out.flush()) throw std::runtime_error("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  std::ostringstream buffer(std::ios::binary);
  write_checkpoint(buffer, checkpoint);
  write_file_atomic(path, buffer.str());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint " + path.string());
  return read_checkpoint(in);
}

std::size_t count_params(ModelKind kind, std::size_t vocabulary, std::size_t input_dim,
                         std::size_t hidden_dim, std::size_t output_dim, std::size_t labels,
                         CountMode mode) {
  std::size_t rows = vocabulary;
  if (mode == CountMode::kActual) {
    rows += kReservedSymbols;
  } else if (kind == ModelKind::kWord) {
    rows += 1;
  }
  const std::size_t embedding = rows * input_dim;
  const std::size_t gru = 2 * 3 * (hidden_dim * input_dim + hidden_dim * hidden_dim + hidden_dim);
  const std::size_t combine = 2 * output_dim * hidden_dim + output_dim;
  const std::size_t softmax = labels * output_dim + labels;
  return embedding + gru + combine + softmax;
}

}  // namespace t2v
