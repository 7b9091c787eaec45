#include "propopt/blade_file.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>
#include <vector>

#include "propopt/errors.hpp"

namespace propopt {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& text, const std::string& where) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) throw FormatError(where + ": expected a number, got '" + text + "'");
  return value;
}

struct SectionBuilder {
  std::optional<double> radius_fraction, pitch, chord;
  SectionDefinition section;
  bool saw_header = false;
};

}  // namespace

BladeDefinition parse_blade(std::istream& in, const std::string& source) {
  BladeDefinition blade;
  std::optional<double> r0, R;
  std::optional<SectionBuilder> current;
  std::string raw;
  int line_no = 0;

  while (std::getline(in, raw)) {
    ++line_no;
    const std::string where = source + ":" + std::to_string(line_no);
    std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;

    if (line == "[section]") {
      if (current) throw FormatError(where + ": nested [section]");
      current.emplace();
      continue;
    }
    if (line == "[end]") {
      if (!current) throw FormatError(where + ": [end] without [section]");
      if (!current->radius_fraction || !current->pitch || !current->chord) {
        throw FormatError(where + ": section needs radius_fraction, pitch and chord");
      }
      current->section.radius_fraction = *current->radius_fraction;
      current->section.pitch = *current->pitch;
      current->section.chord = *current->chord;
      blade.sections.push_back(std::move(current->section));
      current.reset();
      continue;
    }

    if (const auto eq = line.find('='); eq != std::string::npos) {
      const std::string key = trim(std::string_view(line).substr(0, eq));
      const double value = to_double(trim(std::string_view(line).substr(eq + 1)), where);
      if (current) {
        if (key == "radius_fraction") current->radius_fraction = value;
        else if (key == "pitch") current->pitch = value;
        else if (key == "chord") current->chord = value;
        else if (key == "rake") current->section.rake = value;
        else if (key == "skew") current->section.skew = value;
        else throw FormatError(where + ": unknown section key '" + key + "'");
      } else {
        if (key == "r0") r0 = value;
        else if (key == "R") R = value;
        else if (key == "n_blades") blade.n_blades = static_cast<int>(value);
        else throw FormatError(where + ": unknown key '" + key + "'");
      }
      continue;
    }

    if (!current) throw FormatError(where + ": unexpected line '" + line + "'");
    if (!current->saw_header) {
      if (line != "chord_fraction,camber,thickness") {
        throw FormatError(where + ": expected CSV header chord_fraction,camber,thickness");
      }
      current->saw_header = true;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(trim(cell));
    if (cells.size() != 3) throw FormatError(where + ": expected 3 CSV columns");
    const double x = to_double(cells[0], where);
    current->section.camber.push_back({x, to_double(cells[1], where)});
    current->section.thickness.push_back({x, to_double(cells[2], where)});
  }
  if (current) throw FormatError(source + ": unterminated [section] block");
  if (!r0 || !R) throw FormatError(source + ": missing r0 or R");
  blade.hub_radius = *r0;
  blade.tip_radius = *R;
  try {
    blade.validate();
  } catch (const InvalidGeometry& e) {
    throw FormatError(source + ": " + e.what());
  }
  return blade;
}

BladeDefinition read_blade(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open blade file " + path.string());
  return parse_blade(in, path.string());
}

void write_blade(std::ostream& out, const BladeDefinition& blade) {
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << "# propopt blade definition\n";
  out << "r0 = " << blade.hub_radius << "\n";
  out << "R = " << blade.tip_radius << "\n";
  out << "n_blades = " << blade.n_blades << "\n";
  for (const auto& s : blade.sections) {
    if (s.camber.size() != s.thickness.size()) {
      throw InvalidInput("blade file requires camber and thickness on the same chord stations");
    }
    out << "\n[section]\n";
    out << "radius_fraction = " << s.radius_fraction << "\n";
    out << "pitch = " << s.pitch << "\n";
    out << "chord = " << s.chord << "\n";
    out << "rake = " << s.rake << "\n";
    out << "skew = " << s.skew << "\n";
    out << "chord_fraction,camber,thickness\n";
    for (std::size_t i = 0; i < s.camber.size(); ++i) {
      if (s.camber[i].chord_fraction != s.thickness[i].chord_fraction) {
        throw InvalidInput("blade file requires camber and thickness on the same chord stations");
      }
      out << s.camber[i].chord_fraction << "," << s.camber[i].value << "," << s.thickness[i].value
          << "\n";
    }
    out << "[end]\n";
  }
}

void write_blade(const std::filesystem::path& path, const BladeDefinition& blade) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write blade file " + path.string());
  write_blade(out, blade);
}

}  // namespace propopt
