#include "grouplife/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string_view>

namespace grouplife {

namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    fields.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_number(std::string_view text, std::size_t line, const char* what) {
  text = trim(text);
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw ParseError(std::string("invalid ") + what + " '" + std::string(text) + "'", line);
  }
  return value;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::size_t count_prefix(const std::vector<std::string>& names, std::string_view prefix) {
  std::size_t count = 0;
  for (const auto& name : names) count += name.starts_with(prefix) ? 1 : 0;
  return count;
}

}  // namespace

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

// ---------------------------------------------------------------------------
// Datasets

GroupedDataset read_dataset_csv(std::istream& in) {
  std::string line;
  std::size_t line_number = 0;
  if (!std::getline(in, line)) throw ParseError("empty dataset file");
  ++line_number;
  const auto header = split_commas(trim(line));
  if (header.size() < 3 || trim(header[0]) != "group_id" || trim(header[1]) != "time" ||
      trim(header[2]) != "event") {
    throw ParseError("header must start with group_id,time,event", line_number);
  }
  const std::size_t p = header.size() - 3;

  std::vector<Group> groups;
  std::map<std::string, std::size_t, std::less<>> index;
  while (std::getline(in, line)) {
    ++line_number;
    const auto text = trim(line);
    if (text.empty()) continue;
    const auto fields = split_commas(text);
    if (fields.size() != header.size()) {
      throw ParseError("expected " + std::to_string(header.size()) + " fields, found " +
                           std::to_string(fields.size()),
                       line_number);
    }
    const auto id = trim(fields[0]);
    if (id.empty()) throw ParseError("empty group_id", line_number);
    Observation obs;
    obs.time = parse_number(fields[1], line_number, "time");
    if (!(obs.time > 0.0) || !std::isfinite(obs.time)) throw ParseError("time must be positive", line_number);
    const auto event = trim(fields[2]);
    if (event == "1") {
      obs.event = true;
    } else if (event == "0") {
      obs.event = false;
    } else {
      throw ParseError("event must be 0 or 1, found '" + std::string(event) + "'", line_number);
    }
    obs.covariates.resize(p);
    for (std::size_t j = 0; j < p; ++j) obs.covariates[j] = parse_number(fields[3 + j], line_number, "covariate");

    auto it = index.find(id);
    if (it == index.end()) {
      it = index.emplace(std::string(id), groups.size()).first;
      groups.push_back({std::string(id), {}});
    }
    groups[it->second].observations.push_back(std::move(obs));
  }
  if (groups.empty()) throw ParseError("dataset has no rows");
  return GroupedDataset(std::move(groups));
}

GroupedDataset read_dataset_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_dataset_csv(in);
}

void write_dataset_csv(std::ostream& out, const GroupedDataset& data) {
  out << "group_id,time,event";
  for (std::size_t j = 0; j < data.covariate_count(); ++j) out << ",x" << j + 1;
  out << '\n';
  for (const auto& group : data.groups()) {
    for (const auto& obs : group.observations) {
      out << group.id << ',' << format_double(obs.time) << ',' << (obs.event ? 1 : 0);
      for (double x : obs.covariates) out << ',' << format_double(x);
      out << '\n';
    }
  }
}

void write_dataset_csv(const std::filesystem::path& path, const GroupedDataset& data) {
  auto out = open_output(path);
  write_dataset_csv(out, data);
  finish(out, path);
}

std::string dataset_fingerprint(const GroupedDataset& data) {
  std::ostringstream canonical;
  write_dataset_csv(canonical, data);
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical.str()) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buffer[17];
  std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(hash));
  return buffer;
}

// ---------------------------------------------------------------------------
// Traces

void write_trace_csv(std::ostream& out, const Trace& trace) {
  const auto names = trace.column_names();
  for (std::size_t c = 0; c < names.size(); ++c) out << (c ? "," : "") << names[c];
  out << '\n';
  for (const auto& sample : trace.samples) {
    const auto values = trace.row(sample);
    for (std::size_t c = 0; c < values.size(); ++c) out << (c ? "," : "") << format_double(values[c]);
    out << '\n';
  }
}

void write_trace_csv(const std::filesystem::path& path, const Trace& trace) {
  auto out = open_output(path);
  write_trace_csv(out, trace);
  finish(out, path);
}

Trace read_trace_csv(std::istream& in, ErrorKind error) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty trace file");
  std::vector<std::string> names;
  for (auto field : split_commas(trim(line))) names.emplace_back(trim(field));

  Trace trace;
  trace.model.error = error;
  trace.covariate_count = count_prefix(names, "beta[");
  trace.group_count = count_prefix(names, "w[");
  if (count_prefix(names, "p[") > 0) {
    trace.model.latent = LatentKind::discrete;
    trace.model.K = count_prefix(names, "p[");
  } else if (count_prefix(names, "q[") > 0) {
    trace.model.latent = LatentKind::mixed;
    trace.model.K = count_prefix(names, "q[");
  } else if (count_prefix(names, "mu_w") > 0) {
    trace.model.latent = LatentKind::continuous;
    trace.model.K = 1;
  } else {
    trace.model.latent = LatentKind::none;
  }
  if (trace.column_names() != names) throw ParseError("unrecognized trace header", 1);

  const std::size_t p = trace.covariate_count;
  const std::size_t n = trace.group_count;
  const std::size_t K = trace.model.components();
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    const auto text = trim(line);
    if (text.empty()) continue;
    const auto fields = split_commas(text);
    if (fields.size() != names.size()) throw ParseError("wrong number of trace columns", line_number);
    std::vector<double> v(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c) v[c] = parse_number(fields[c], line_number, "trace value");

    Sample sample;
    auto& s = sample.state;
    std::size_t c = 0;
    s.theta.beta0 = v[c++];
    s.theta.beta.assign(v.begin() + static_cast<std::ptrdiff_t>(c), v.begin() + static_cast<std::ptrdiff_t>(c + p));
    c += p;
    s.theta.sigma = v[c++];
    auto take = [&](std::size_t count) {
      std::vector<double> out(v.begin() + static_cast<std::ptrdiff_t>(c), v.begin() + static_cast<std::ptrdiff_t>(c + count));
      c += count;
      return out;
    };
    switch (trace.model.latent) {
      case LatentKind::none: break;
      case LatentKind::discrete:
        s.law.weights = take(K);
        s.law.locations = take(K);
        break;
      case LatentKind::continuous:
        s.law.weights = {1.0};
        s.law.locations = take(1);
        s.law.scales = take(1);
        break;
      case LatentKind::mixed:
        s.law.weights = take(K);
        s.law.locations = take(K);
        s.law.scales = take(K);
        break;
    }
    if (trace.model.latent != LatentKind::none) {
      s.latent.w = take(n);
    } else {
      s.latent.w.assign(n, 0.0);
    }
    if (trace.model.latent == LatentKind::discrete || trace.model.latent == LatentKind::mixed) {
      for (double x : take(n)) s.latent.xi.push_back(static_cast<int>(x) - 1);
    }
    sample.log_likelihood = v[c];
    trace.samples.push_back(std::move(sample));
  }
  return trace;
}

Trace read_trace_csv(const std::filesystem::path& path, ErrorKind error) {
  auto in = open_input(path);
  return read_trace_csv(in, error);
}

void write_curve(std::ostream& out, const std::string& x_name, const std::string& y_name,
                 std::span<const double> x, std::span<const double> y) {
  out << x_name << '\t' << y_name << '\n';
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    out << format_double(x[i]) << '\t' << format_double(y[i]) << '\n';
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  auto out = open_output(path);
  out << text;
  finish(out, path);
}

}  // namespace grouplife
