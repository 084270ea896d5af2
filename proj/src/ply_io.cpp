#include "enstrect/ply_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "enstrect/error.hpp"

namespace enstrect {

namespace {

enum class PlyType { kInt8, kUInt8, kInt16, kUInt16, kInt32, kUInt32, kFloat32, kFloat64 };

std::size_t type_size(PlyType t) {
  switch (t) {
    case PlyType::kInt8:
    case PlyType::kUInt8:
      return 1;
    case PlyType::kInt16:
    case PlyType::kUInt16:
      return 2;
    case PlyType::kInt32:
    case PlyType::kUInt32:
    case PlyType::kFloat32:
      return 4;
    case PlyType::kFloat64:
      return 8;
  }
  return 0;
}

PlyType parse_type(const std::string& s) {
  static const std::map<std::string, PlyType> table = {
      {"char", PlyType::kInt8},     {"int8", PlyType::kInt8},
      {"uchar", PlyType::kUInt8},   {"uint8", PlyType::kUInt8},
      {"short", PlyType::kInt16},   {"int16", PlyType::kInt16},
      {"ushort", PlyType::kUInt16}, {"uint16", PlyType::kUInt16},
      {"int", PlyType::kInt32},     {"int32", PlyType::kInt32},
      {"uint", PlyType::kUInt32},   {"uint32", PlyType::kUInt32},
      {"float", PlyType::kFloat32}, {"float32", PlyType::kFloat32},
      {"double", PlyType::kFloat64},{"float64", PlyType::kFloat64},
  };
  const auto it = table.find(s);
  if (it == table.end()) throw ValidationError("ply: unsupported property type '" + s + "'");
  return it->second;
}

struct PlyProperty {
  std::string name;
  PlyType type = PlyType::kFloat32;
  bool is_list = false;
  PlyType count_type = PlyType::kUInt8;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> properties;
};

struct PlyHeader {
  bool binary = false;
  std::vector<PlyElement> elements;
  std::vector<std::string> comments;
};

PlyHeader parse_header(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("ply: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "ply") throw ValidationError("ply: missing 'ply' magic");

  PlyHeader header;
  bool format_seen = false, ended = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "comment" || key == "obj_info") {
      header.comments.push_back(line.size() > key.size() ? line.substr(key.size() + 1) : "");
      continue;
    }
    if (key == "format") {
      std::string fmt, version;
      ls >> fmt >> version;
      if (fmt == "ascii")
        header.binary = false;
      else if (fmt == "binary_little_endian")
        header.binary = true;
      else
        throw ValidationError("ply: unsupported format '" + fmt + "'");
      format_seen = true;
      continue;
    }
    if (key == "element") {
      PlyElement el;
      ls >> el.name >> el.count;
      if (ls.fail()) throw ValidationError("ply: malformed element line");
      header.elements.push_back(el);
      continue;
    }
    if (key == "property") {
      if (header.elements.empty()) throw ValidationError("ply: property before element");
      std::string t;
      ls >> t;
      PlyProperty prop;
      if (t == "list") {
        std::string ct, vt;
        ls >> ct >> vt >> prop.name;
        prop.is_list = true;
        prop.count_type = parse_type(ct);
        prop.type = parse_type(vt);
      } else {
        prop.type = parse_type(t);
        ls >> prop.name;
      }
      if (prop.name.empty()) throw ValidationError("ply: property without a name");
      header.elements.back().properties.push_back(prop);
      continue;
    }
    if (key == "end_header") {
      ended = true;
      break;
    }
    throw ValidationError("ply: unrecognized header line '" + line + "'");
  }
  if (!ended) throw ValidationError("ply: missing end_header");
  if (!format_seen) throw ValidationError("ply: missing format line");
  return header;
}

double decode_scalar(const unsigned char* p, PlyType t) {
  switch (t) {
    case PlyType::kInt8: {
      std::int8_t v;
      std::memcpy(&v, p, 1);
      return v;
    }
    case PlyType::kUInt8: {
      std::uint8_t v;
      std::memcpy(&v, p, 1);
      return v;
    }
    case PlyType::kInt16: {
      std::int16_t v;
      std::memcpy(&v, p, 2);
      return v;
    }
    case PlyType::kUInt16: {
      std::uint16_t v;
      std::memcpy(&v, p, 2);
      return v;
    }
    case PlyType::kInt32: {
      std::int32_t v;
      std::memcpy(&v, p, 4);
      return v;
    }
    case PlyType::kUInt32: {
      std::uint32_t v;
      std::memcpy(&v, p, 4);
      return v;
    }
    case PlyType::kFloat32: {
      float v;
      std::memcpy(&v, p, 4);
      return v;
    }
    case PlyType::kFloat64: {
      double v;
      std::memcpy(&v, p, 8);
      return v;
    }
  }
  return 0.0;
}

// Parsed vertex table: per-property column of doubles.
struct VertexData {
  std::size_t count = 0;
  std::map<std::string, std::vector<double>> columns;
  std::vector<std::string> comments;
};

VertexData read_vertex_data(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("ply: cannot open '" + path + "'");
  const PlyHeader header = parse_header(in);

  VertexData data;
  data.comments = header.comments;
  for (const auto& el : header.elements) {
    if (el.name != "vertex") {
      // Skip foreign elements wholesale.
      if (header.binary) {
        for (std::size_t i = 0; i < el.count; ++i) {
          for (const auto& prop : el.properties) {
            std::size_t n = 1;
            if (prop.is_list) {
              std::vector<unsigned char> cbuf(type_size(prop.count_type));
              in.read(reinterpret_cast<char*>(cbuf.data()), cbuf.size());
              if (!in) throw ValidationError("ply: truncated body");
              n = static_cast<std::size_t>(decode_scalar(cbuf.data(), prop.count_type));
            }
            in.seekg(static_cast<std::streamoff>(n * type_size(prop.type)), std::ios::cur);
            if (!in) throw ValidationError("ply: truncated body");
          }
        }
      } else {
        for (std::size_t i = 0; i < el.count; ++i) {
          for (const auto& prop : el.properties) {
            std::size_t n = 1;
            if (prop.is_list) {
              double c;
              if (!(in >> c)) throw ValidationError("ply: truncated body");
              n = static_cast<std::size_t>(c);
            }
            double v;
            for (std::size_t j = 0; j < n; ++j)
              if (!(in >> v)) throw ValidationError("ply: truncated body");
          }
        }
      }
      continue;
    }

    data.count = el.count;
    for (const auto& prop : el.properties)
      if (!prop.is_list) data.columns[prop.name].reserve(el.count);

    if (header.binary) {
      std::size_t row_size = 0;
      for (const auto& prop : el.properties) {
        if (prop.is_list)
          throw ValidationError("ply: list property on vertex element is unsupported");
        row_size += type_size(prop.type);
      }
      std::vector<unsigned char> buf(row_size * el.count);
      in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
      if (static_cast<std::size_t>(in.gcount()) != buf.size())
        throw ValidationError("ply: truncated body");
      const unsigned char* p = buf.data();
      for (std::size_t i = 0; i < el.count; ++i) {
        for (const auto& prop : el.properties) {
          data.columns[prop.name].push_back(decode_scalar(p, prop.type));
          p += type_size(prop.type);
        }
      }
    } else {
      for (std::size_t i = 0; i < el.count; ++i) {
        for (const auto& prop : el.properties) {
          double v;
          if (!(in >> v))
            throw ValidationError(in.eof() ? "ply: truncated body"
                                           : "ply: malformed numeric value");
          data.columns[prop.name].push_back(v);
        }
      }
    }
  }
  if (data.count == 0 && data.columns.empty())
    throw ValidationError("ply: no vertex element");
  return data;
}

PointCloud cloud_from_columns(const VertexData& data) {
  const auto x = data.columns.find("x");
  const auto y = data.columns.find("y");
  const auto z = data.columns.find("z");
  if (x == data.columns.end() || y == data.columns.end() || z == data.columns.end())
    throw ValidationError("ply: missing x/y/z vertex properties");

  PointCloud cloud;
  cloud.positions.resize(data.count);
  for (std::size_t i = 0; i < data.count; ++i)
    cloud.positions[i] = {x->second[i], y->second[i], z->second[i]};

  if (data.columns.count("nx") && data.columns.count("ny") && data.columns.count("nz")) {
    cloud.normals.resize(data.count);
    for (std::size_t i = 0; i < data.count; ++i)
      cloud.normals[i] = {data.columns.at("nx")[i], data.columns.at("ny")[i],
                          data.columns.at("nz")[i]};
  }
  if (data.columns.count("red") && data.columns.count("green") && data.columns.count("blue")) {
    cloud.colors.resize(data.count);
    for (std::size_t i = 0; i < data.count; ++i)
      cloud.colors[i] = {static_cast<std::uint8_t>(data.columns.at("red")[i]),
                         static_cast<std::uint8_t>(data.columns.at("green")[i]),
                         static_cast<std::uint8_t>(data.columns.at("blue")[i])};
  }
  cloud.validate();
  return cloud;
}

class PlyWriter {
 public:
  PlyWriter(const std::string& path, bool binary) : out_(path, std::ios::binary), binary_(binary) {
    if (!out_) throw ValidationError("ply: cannot open '" + path + "' for writing");
  }

  void header(std::size_t count, const std::vector<std::pair<std::string, std::string>>& props,
              const std::vector<std::string>& comments) {
    out_ << "ply\n"
         << (binary_ ? "format binary_little_endian 1.0\n" : "format ascii 1.0\n");
    for (const auto& c : comments) out_ << "comment " << c << "\n";
    out_ << "element vertex " << count << "\n";
    for (const auto& [type, name] : props) out_ << "property " << type << " " << name << "\n";
    out_ << "end_header\n";
  }

  void scalar(double v, const std::string& type) {
    if (binary_) {
      if (type == "double") {
        out_.write(reinterpret_cast<const char*>(&v), 8);
      } else if (type == "float") {
        const float f = static_cast<float>(v);
        out_.write(reinterpret_cast<const char*>(&f), 4);
      } else if (type == "int") {
        const std::int32_t i = static_cast<std::int32_t>(v);
        out_.write(reinterpret_cast<const char*>(&i), 4);
      } else {
        const std::uint8_t u = static_cast<std::uint8_t>(v);
        out_.write(reinterpret_cast<const char*>(&u), 1);
      }
    } else {
      if (!first_) out_ << " ";
      if (type == "double") {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out_ << buf;
      } else if (type == "float") {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.9g", static_cast<float>(v));
        out_ << buf;
      } else {
        out_ << static_cast<long long>(v);
      }
      first_ = false;
    }
  }

  void end_row() {
    if (!binary_) {
      out_ << "\n";
      first_ = true;
    }
  }

  void finish() {
    out_.flush();
    if (!out_) throw ProcessingError("ply: write failed");
  }

 private:
  std::ofstream out_;
  bool binary_;
  bool first_ = true;
};

}  // namespace

PointCloud read_ply(const std::string& path) { return cloud_from_columns(read_vertex_data(path)); }

void write_ply(const PointCloud& cloud, const std::string& path, bool binary) {
  cloud.validate();
  std::vector<std::pair<std::string, std::string>> props = {
      {"double", "x"}, {"double", "y"}, {"double", "z"}};
  if (cloud.has_normals()) {
    props.insert(props.end(), {{"double", "nx"}, {"double", "ny"}, {"double", "nz"}});
  }
  if (cloud.has_colors()) {
    props.insert(props.end(), {{"uchar", "red"}, {"uchar", "green"}, {"uchar", "blue"}});
  }
  PlyWriter w(path, binary);
  w.header(cloud.size(), props, {});
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    for (int a = 0; a < 3; ++a) w.scalar(cloud.positions[i][a], "double");
    if (cloud.has_normals())
      for (int a = 0; a < 3; ++a) w.scalar(cloud.normals[i][a], "double");
    if (cloud.has_colors())
      for (int a = 0; a < 3; ++a) w.scalar(cloud.colors[i][a], "uchar");
    w.end_row();
  }
  w.finish();
}

SegmentedCloud read_segmented_ply(const std::string& path) {
  const VertexData data = read_vertex_data(path);

  SegmentedCloud seg;
  seg.cloud = cloud_from_columns(data);

  // Catalog from the classes comment; fall back to score_* column order.
  std::vector<std::string> classes;
  int background = 0;
  for (const auto& c : data.comments) {
    std::istringstream ls(c);
    std::string key;
    ls >> key;
    if (key == "classes") {
      std::string name;
      while (ls >> name) classes.push_back(name);
    } else if (key == "background_index") {
      ls >> background;
    }
  }
  if (classes.empty()) {
    for (const auto& [name, col] : data.columns)
      if (name.rfind("score_", 0) == 0) classes.push_back(name.substr(6));
  }
  if (classes.empty()) throw ValidationError("ply: segmented cloud without class scores");
  seg.catalog.names = classes;
  seg.catalog.background = background;
  seg.catalog.validate();

  const auto label_it = data.columns.find("label");
  if (label_it == data.columns.end())
    throw ValidationError("ply: segmented cloud without label property");
  seg.labels.resize(data.count);
  for (std::size_t i = 0; i < data.count; ++i)
    seg.labels[i] = static_cast<int>(label_it->second[i]);

  seg.view_counts.assign(data.count, 0);
  const auto views_it = data.columns.find("views");
  if (views_it != data.columns.end())
    for (std::size_t i = 0; i < data.count; ++i)
      seg.view_counts[i] = static_cast<int>(views_it->second[i]);

  seg.scores.assign(data.count * classes.size(), 0.0);
  for (std::size_t c = 0; c < classes.size(); ++c) {
    const auto col = data.columns.find("score_" + classes[c]);
    if (col == data.columns.end())
      throw ValidationError("ply: missing score property for class '" + classes[c] + "'");
    for (std::size_t i = 0; i < data.count; ++i)
      seg.scores[i * classes.size() + c] = col->second[i];
  }
  seg.validate();
  return seg;
}

void write_segmented_ply(const SegmentedCloud& seg, const std::string& path, bool binary) {
  seg.validate();
  std::vector<std::pair<std::string, std::string>> props = {
      {"double", "x"}, {"double", "y"}, {"double", "z"}};
  if (seg.cloud.has_normals())
    props.insert(props.end(), {{"double", "nx"}, {"double", "ny"}, {"double", "nz"}});
  if (seg.cloud.has_colors())
    props.insert(props.end(), {{"uchar", "red"}, {"uchar", "green"}, {"uchar", "blue"}});
  props.push_back({"int", "label"});
  props.push_back({"int", "views"});
  for (const auto& name : seg.catalog.names) props.push_back({"float", "score_" + name});

  std::string classes_comment = "classes";
  for (const auto& name : seg.catalog.names) classes_comment += " " + name;

  PlyWriter w(path, binary);
  w.header(seg.cloud.size(), props,
           {classes_comment, "background_index " + std::to_string(seg.catalog.background)});
  const std::size_t nc = seg.catalog.names.size();
  for (std::size_t i = 0; i < seg.cloud.size(); ++i) {
    for (int a = 0; a < 3; ++a) w.scalar(seg.cloud.positions[i][a], "double");
    if (seg.cloud.has_normals())
      for (int a = 0; a < 3; ++a) w.scalar(seg.cloud.normals[i][a], "double");
    if (seg.cloud.has_colors())
      for (int a = 0; a < 3; ++a) w.scalar(seg.cloud.colors[i][a], "uchar");
    w.scalar(seg.labels[i], "int");
    w.scalar(seg.view_counts[i], "int");
    for (std::size_t c = 0; c < nc; ++c) w.scalar(seg.scores[i * nc + c], "float");
    w.end_row();
  }
  w.finish();
}

}  // namespace enstrect
