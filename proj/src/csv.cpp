#include "tsadforge/csv.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

namespace tsadforge {

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

double parse_double(std::string_view s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw Error(ErrorCode::ParseError, "not a number: '" + std::string(s) + "'");
  return v;
}

std::vector<std::string> channel_header(Index d) {
  std::vector<std::string> out;
  for (Index c = 0; c < d; ++c) out.push_back("ch_" + std::to_string(c));
  return out;
}

namespace {

void append_header(std::string& out, const std::vector<std::string>& cols) {
  out += "t";
  for (const auto& c : cols) {
    out += ',';
    out += c;
  }
  out += '\n';
}

template <typename Cell>
std::string render(Index rows, const std::vector<std::string>& header, Cell&& cell) {
  std::string out;
  out.reserve(static_cast<std::size_t>(rows) * (header.size() * 20 + 8));
  append_header(out, header);
  std::array<char, 32> buf{};
  for (Index t = 0; t < rows; ++t) {
    auto r = std::to_chars(buf.data(), buf.data() + buf.size(), t);
    out.append(buf.data(), r.ptr);
    for (std::size_t c = 0; c < header.size(); ++c) {
      out += ',';
      cell(out, t, static_cast<Index>(c), buf);
    }
    out += '\n';
  }
  return out;
}

}  // namespace

std::string panel_to_csv(const Panel& x) {
  return render(x.rows(), channel_header(x.cols()), [&](std::string& out, Index t, Index c, std::array<char, 32>& buf) {
    auto r = std::to_chars(buf.data(), buf.data() + buf.size(), x(t, c));
    out.append(buf.data(), r.ptr);
  });
}

std::string mask_to_csv(const Mask& m) {
  return render(m.rows(), channel_header(m.cols()), [&](std::string& out, Index t, Index c, std::array<char, 32>&) {
    out += m(t, c) ? '1' : '0';
  });
}

std::string scores_to_csv(const Series& s) {
  return render(s.size(), {"score"}, [&](std::string& out, Index t, Index, std::array<char, 32>& buf) {
    auto r = std::to_chars(buf.data(), buf.data() + buf.size(), s[t]);
    out.append(buf.data(), r.ptr);
  });
}

CsvTable parse_csv(std::string_view text) {
  CsvTable table;
  std::vector<double> cells;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  Index rows = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    std::vector<std::string_view> fields;
    std::size_t f = 0;
    while (true) {
      const std::size_t comma = line.find(',', f);
      fields.push_back(line.substr(f, comma == std::string_view::npos ? std::string_view::npos : comma - f));
      if (comma == std::string_view::npos) break;
      f = comma + 1;
    }

    if (line_no == 1) {
      if (fields.empty() || fields.front() != "t")
        throw Error(ErrorCode::ParseError, "line 1: header must start with 't'");
      for (std::size_t i = 1; i < fields.size(); ++i) table.header.emplace_back(fields[i]);
      continue;
    }
    if (line.empty() && pos >= text.size()) break;
    if (fields.size() != table.header.size() + 1)
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected " +
                                             std::to_string(table.header.size() + 1) + " columns, found " +
                                             std::to_string(fields.size()));
    for (std::size_t i = 1; i < fields.size(); ++i) {
      try {
        cells.push_back(parse_double(fields[i]));
      } catch (const Error&) {
        throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ", column " + std::to_string(i + 1) +
                                               ": not a number: '" + std::string(fields[i]) + "'");
      }
    }
    ++rows;
  }
  if (line_no == 0) throw Error(ErrorCode::ParseError, "empty csv");
  const auto cols = static_cast<Index>(table.header.size());
  table.values.resize(rows, cols);
  for (Index t = 0; t < rows; ++t)
    for (Index c = 0; c < cols; ++c) table.values(t, c) = cells[static_cast<std::size_t>(t * cols + c)];
  return table;
}

Mask parse_mask_csv(std::string_view text) {
  const CsvTable table = parse_csv(text);
  Mask m(table.values.rows(), table.values.cols());
  for (Index t = 0; t < m.rows(); ++t) {
    for (Index c = 0; c < m.cols(); ++c) {
      const double v = table.values(t, c);
      if (v != 0.0 && v != 1.0)
        throw Error(ErrorCode::ParseError, "line " + std::to_string(t + 2) + ": label cells must be 0 or 1");
      m(t, c) = v == 1.0 ? 1 : 0;
    }
  }
  return m;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path + "'");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(ErrorCode::IoError, "write failed for '" + path + "'");
}

}  // namespace tsadforge
