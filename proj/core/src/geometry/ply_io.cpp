#include "posekit/geometry/ply_io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "posekit/error.hpp"

namespace posekit::geometry {

static_assert(std::endian::native == std::endian::little,
              "binary PLY I/O assumes a little-endian host");

namespace {

enum class ScalarType { Int8, UInt8, Int16, UInt16, Int32, UInt32, Float32, Float64 };

struct Property {
    std::string name;
    ScalarType type = ScalarType::Float32;
    bool is_list = false;
};

struct Element {
    std::string name;
    std::size_t count = 0;
    std::vector<Property> properties;
};

ScalarType parse_type(const std::string &t) {
    if (t == "char" || t == "int8") return ScalarType::Int8;
    if (t == "uchar" || t == "uint8") return ScalarType::UInt8;
    if (t == "short" || t == "int16") return ScalarType::Int16;
    if (t == "ushort" || t == "uint16") return ScalarType::UInt16;
    if (t == "int" || t == "int32") return ScalarType::Int32;
    if (t == "uint" || t == "uint32") return ScalarType::UInt32;
    if (t == "float" || t == "float32") return ScalarType::Float32;
    if (t == "double" || t == "float64") return ScalarType::Float64;
    throw Error(ErrorCode::ParseError, "unknown PLY property type '" + t + "'");
}

std::size_t type_size(ScalarType t) {
    switch (t) {
        case ScalarType::Int8:
        case ScalarType::UInt8: return 1;
        case ScalarType::Int16:
        case ScalarType::UInt16: return 2;
        case ScalarType::Int32:
        case ScalarType::UInt32:
        case ScalarType::Float32: return 4;
        case ScalarType::Float64: return 8;
    }
    return 0;
}

template <typename T>
T load(const char *bytes) {
    T value;
    std::memcpy(&value, bytes, sizeof(T));
    return value;
}

double decode(ScalarType t, const char *bytes) {
    switch (t) {
        case ScalarType::Int8: return load<std::int8_t>(bytes);
        case ScalarType::UInt8: return load<std::uint8_t>(bytes);
        case ScalarType::Int16: return load<std::int16_t>(bytes);
        case ScalarType::UInt16: return load<std::uint16_t>(bytes);
        case ScalarType::Int32: return load<std::int32_t>(bytes);
        case ScalarType::UInt32: return load<std::uint32_t>(bytes);
        case ScalarType::Float32: return load<float>(bytes);
        case ScalarType::Float64: return load<double>(bytes);
    }
    return 0.0;
}

double parse_number(const std::string &token) {
    double value = 0.0;
    const auto *end = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(token.data(), end, value);
    if (ec != std::errc() || ptr != end) {
        throw Error(ErrorCode::ParseError, "bad PLY number '" + token + "'");
    }
    return value;
}

struct VertexLayout {
    int x = -1, y = -1, z = -1;
    int nx = -1, ny = -1, nz = -1;
    int r = -1, g = -1, b = -1;
    bool color_is_integer = true;
};

VertexLayout layout_of(const Element &vertex) {
    VertexLayout l;
    for (int i = 0; i < static_cast<int>(vertex.properties.size()); ++i) {
        const auto &p = vertex.properties[i];
        if (p.is_list) {
            throw Error(ErrorCode::ParseError,
                        "list property '" + p.name + "' in vertex element");
        }
        if (p.name == "x") l.x = i;
        else if (p.name == "y") l.y = i;
        else if (p.name == "z") l.z = i;
        else if (p.name == "nx") l.nx = i;
        else if (p.name == "ny") l.ny = i;
        else if (p.name == "nz") l.nz = i;
        else if (p.name == "red" || p.name == "r") l.r = i;
        else if (p.name == "green" || p.name == "g") l.g = i;
        else if (p.name == "blue" || p.name == "b") l.b = i;
    }
    if (l.x < 0 || l.y < 0 || l.z < 0) {
        throw Error(ErrorCode::ParseError, "vertex element lacks x/y/z");
    }
    if (l.r >= 0) {
        const auto t = vertex.properties[l.r].type;
        l.color_is_integer = t != ScalarType::Float32 && t != ScalarType::Float64;
    }
    return l;
}

template <typename Fmt>
void append_float(std::string &out, Fmt value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    out.append(buf, ptr);
}

}  // namespace

PointCloud read_ply(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());

    std::string line;
    std::getline(in, line);
    if (line != "ply" && line != "ply\r") {
        throw Error(ErrorCode::ParseError, path.string() + " is not a PLY file");
    }
    bool binary = false;
    bool have_format = false;
    std::vector<Element> elements;
    for (;;) {
        if (!std::getline(in, line)) {
            throw Error(ErrorCode::ParseError, "truncated PLY header");
        }
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ls(line);
        std::string keyword;
        ls >> keyword;
        if (keyword == "end_header") break;
        if (keyword == "comment" || keyword == "obj_info" || keyword.empty()) {
            continue;
        }
        if (keyword == "format") {
            std::string fmt;
            ls >> fmt;
            if (fmt == "ascii") binary = false;
            else if (fmt == "binary_little_endian") binary = true;
            else throw Error(ErrorCode::ParseError, "unsupported PLY format " + fmt);
            have_format = true;
        } else if (keyword == "element") {
            Element e;
            long long count = -1;
            ls >> e.name >> count;
            if (!ls || count < 0) {
                throw Error(ErrorCode::ParseError, "bad element line: " + line);
            }
            e.count = static_cast<std::size_t>(count);
            elements.push_back(std::move(e));
        } else if (keyword == "property") {
            if (elements.empty()) {
                throw Error(ErrorCode::ParseError, "property before element");
            }
            std::string type;
            ls >> type;
            Property p;
            if (type == "list") {
                std::string count_type, item_type;
                ls >> count_type >> item_type >> p.name;
                p.is_list = true;
                p.type = parse_type(item_type);
            } else {
                p.type = parse_type(type);
                ls >> p.name;
            }
            if (p.name.empty()) {
                throw Error(ErrorCode::ParseError, "bad property line: " + line);
            }
            elements.back().properties.push_back(std::move(p));
        } else {
            throw Error(ErrorCode::ParseError, "unexpected PLY header line: " + line);
        }
    }
    if (!have_format) throw Error(ErrorCode::ParseError, "PLY header lacks format");

    const Element *vertex = nullptr;
    for (const auto &e : elements) {
        if (e.name == "vertex") {
            vertex = &e;
            break;
        }
        // Skip elements that precede the vertices.
        if (binary) {
            std::size_t stride = 0;
            for (const auto &p : e.properties) {
                if (p.is_list) {
                    throw Error(ErrorCode::ParseError,
                                "list element before vertex is unsupported");
                }
                stride += type_size(p.type);
            }
            in.ignore(static_cast<std::streamsize>(stride * e.count));
        } else {
            for (std::size_t i = 0; i < e.count; ++i) std::getline(in, line);
        }
        if (!in) throw Error(ErrorCode::ParseError, "truncated PLY body");
    }
    if (vertex == nullptr) throw Error(ErrorCode::ParseError, "no vertex element");

    const VertexLayout l = layout_of(*vertex);
    const bool has_normals = l.nx >= 0 && l.ny >= 0 && l.nz >= 0;
    const bool has_colors = l.r >= 0 && l.g >= 0 && l.b >= 0;
    const std::size_t nprops = vertex->properties.size();

    std::vector<std::size_t> offsets(nprops);
    std::size_t stride = 0;
    for (std::size_t i = 0; i < nprops; ++i) {
        offsets[i] = stride;
        stride += type_size(vertex->properties[i].type);
    }

    std::vector<Vec3> points(vertex->count);
    std::vector<Vec3> normals(has_normals ? vertex->count : 0);
    std::vector<Vec3> colors(has_colors ? vertex->count : 0);
    std::vector<double> values(nprops);
    std::vector<char> record(stride);
    for (std::size_t v = 0; v < vertex->count; ++v) {
        if (binary) {
            if (!in.read(record.data(), static_cast<std::streamsize>(stride))) {
                throw Error(ErrorCode::ParseError, "truncated PLY vertex data");
            }
            for (std::size_t i = 0; i < nprops; ++i) {
                values[i] = decode(vertex->properties[i].type,
                                   record.data() + offsets[i]);
            }
        } else {
            for (std::size_t i = 0; i < nprops; ++i) {
                std::string token;
                if (!(in >> token)) {
                    throw Error(ErrorCode::ParseError, "truncated PLY vertex data");
                }
                values[i] = parse_number(token);
            }
        }
        points[v] = Vec3(values[l.x], values[l.y], values[l.z]);
        if (has_normals) normals[v] = Vec3(values[l.nx], values[l.ny], values[l.nz]);
        if (has_colors) {
            Vec3 c(values[l.r], values[l.g], values[l.b]);
            if (l.color_is_integer) c /= 255.0;
            colors[v] = c;
        }
    }
    try {
        return PointCloud(std::move(points), std::move(normals), std::move(colors));
    } catch (const Error &e) {
        throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
    }
}

void write_ply(const std::filesystem::path &path, const PointCloud &cloud,
               PlyFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());

    std::string header = "ply\n";
    header += format == PlyFormat::Ascii ? "format ascii 1.0\n"
                                         : "format binary_little_endian 1.0\n";
    header += "element vertex " + std::to_string(cloud.size()) + "\n";
    header += "property float x\nproperty float y\nproperty float z\n";
    if (cloud.has_normals()) {
        header += "property float nx\nproperty float ny\nproperty float nz\n";
    }
    if (cloud.has_colors()) {
        header += "property uchar red\nproperty uchar green\nproperty uchar blue\n";
    }
    header += "end_header\n";
    out << header;

    auto color_byte = [](double c) {
        return static_cast<std::uint8_t>(std::lround(c * 255.0));
    };

    if (format == PlyFormat::Ascii) {
        std::string body;
        for (std::size_t i = 0; i < cloud.size(); ++i) {
            const auto &p = cloud.point(i);
            for (int k = 0; k < 3; ++k) {
                if (k) body += ' ';
                append_float(body, static_cast<float>(p[k]));
            }
            if (cloud.has_normals()) {
                for (int k = 0; k < 3; ++k) {
                    body += ' ';
                    append_float(body, static_cast<float>(cloud.normal(i)[k]));
                }
            }
            if (cloud.has_colors()) {
                for (int k = 0; k < 3; ++k) {
                    body += ' ';
                    body += std::to_string(color_byte(cloud.colors()[i][k]));
                }
            }
            body += '\n';
        }
        out << body;
    } else {
        std::vector<char> body;
        body.reserve(cloud.size() * 27);
        auto put = [&body](const auto value) {
            const char *bytes = reinterpret_cast<const char *>(&value);
            body.insert(body.end(), bytes, bytes + sizeof(value));
        };
        for (std::size_t i = 0; i < cloud.size(); ++i) {
            const auto &p = cloud.point(i);
            for (int k = 0; k < 3; ++k) put(static_cast<float>(p[k]));
            if (cloud.has_normals()) {
                for (int k = 0; k < 3; ++k) {
                    put(static_cast<float>(cloud.normal(i)[k]));
                }
            }
            if (cloud.has_colors()) {
                for (int k = 0; k < 3; ++k) put(color_byte(cloud.colors()[i][k]));
            }
        }
        out.write(body.data(), static_cast<std::streamsize>(body.size()));
    }
    if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

}  // namespace posekit::geometry
