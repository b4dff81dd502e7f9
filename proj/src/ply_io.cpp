#include "blurforge/ply_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "blurforge/errors.hpp"

namespace blurforge {

namespace {

std::size_t ply_type_size(const std::string& type) {
    if (type == "float" || type == "float32" || type == "int" || type == "int32" ||
        type == "uint" || type == "uint32")
        return 4;
    if (type == "double" || type == "float64") return 8;
    if (type == "short" || type == "ushort" || type == "int16" || type == "uint16") return 2;
    if (type == "char" || type == "uchar" || type == "int8" || type == "uint8") return 1;
    throw FormatError("unsupported PLY property type: " + type);
}

struct PlyProperty {
    std::string type;
    std::size_t offset = 0;  // byte offset within one vertex record
};

struct PlyHeader {
    std::size_t vertex_count = 0;
    std::size_t vertex_stride = 0;
    std::map<std::string, PlyProperty> properties;
    std::streampos data_start;
};

PlyHeader parse_header(std::istream& in, const std::string& path_label) {
    std::string line;
    if (!std::getline(in, line) || line != "ply")
        throw FormatError(path_label + ": not a PLY file");

    PlyHeader header;
    bool format_seen = false;
    bool in_vertex_element = false;
    std::size_t offset = 0;

    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ls(line);
        std::string tok;
        ls >> tok;
        if (tok == "comment" || tok.empty()) continue;
        if (tok == "format") {
            std::string fmt, version;
            ls >> fmt >> version;
            if (fmt != "binary_little_endian")
                throw FormatError(path_label + ": expected binary_little_endian, got " + fmt);
            format_seen = true;
        } else if (tok == "element") {
            std::string name;
            std::size_t count = 0;
            ls >> name >> count;
            if (name == "vertex") {
                header.vertex_count = count;
                in_vertex_element = true;
            } else {
                // Any trailing element would shift the data layout we read.
                if (in_vertex_element && header.vertex_count > 0)
                    throw FormatError(path_label + ": unsupported extra element '" + name + "'");
                in_vertex_element = false;
            }
        } else if (tok == "property") {
            std::string type, name;
            ls >> type;
            if (type == "list")
                throw FormatError(path_label + ": list properties are not supported");
            ls >> name;
            if (in_vertex_element) {
                header.properties[name] = {type, offset};
                offset += ply_type_size(type);
            }
        } else if (tok == "end_header") {
            header.vertex_stride = offset;
            header.data_start = in.tellg();
            if (!format_seen) throw FormatError(path_label + ": missing format line");
            if (header.vertex_count == 0)
                throw FormatError(path_label + ": missing vertex element");
            return header;
        }
    }
    throw FormatError(path_label + ": unterminated header");
}

// Reader for one float property at a fixed offset within the record.
class FieldReader {
public:
    FieldReader() = default;
    FieldReader(const PlyProperty& prop) : offset_(prop.offset), is_double_(prop.type == "double" || prop.type == "float64") {}

    double read(const unsigned char* record) const {
        if (is_double_) {
            double v;
            std::memcpy(&v, record + offset_, sizeof(v));
            return v;
        }
        float v;
        std::memcpy(&v, record + offset_, sizeof(v));
        return static_cast<double>(v);
    }

private:
    std::size_t offset_ = 0;
    bool is_double_ = false;
};

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void append_f32(std::string& buf, float v) {
    char raw[4];
    std::memcpy(raw, &v, 4);
    buf.append(raw, 4);
}

}  // namespace

GaussianScene load_scene(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open scene file: " + path.string());
    const std::string label = path.filename().string();

    PlyHeader header = parse_header(in, label);

    static const char* kRequired[] = {"x",       "y",       "z",       "f_dc_0", "f_dc_1",
                                      "f_dc_2",  "opacity", "scale_0", "scale_1", "scale_2",
                                      "rot_0",   "rot_1",   "rot_2",   "rot_3"};
    for (const char* name : kRequired) {
        if (!header.properties.count(name))
            throw FormatError(label + ": missing required PLY property '" + std::string(name) + "'");
    }

    // f_rest count decides the stored SH degree; lower degrees are padded.
    int rest_count = 0;
    while (header.properties.count("f_rest_" + std::to_string(rest_count))) ++rest_count;
    if (rest_count != 0 && rest_count != 9 && rest_count != 24 && rest_count != 45)
        throw FormatError(label + ": f_rest property count " + std::to_string(rest_count) +
                          " does not match any SH degree (expected 0, 9, 24 or 45)");
    const int rest_per_channel = rest_count / 3;

    auto reader = [&](const std::string& name) { return FieldReader(header.properties.at(name)); };
    const FieldReader rx = reader("x"), ry = reader("y"), rz = reader("z");
    const FieldReader rdc[3] = {reader("f_dc_0"), reader("f_dc_1"), reader("f_dc_2")};
    const FieldReader ropacity = reader("opacity");
    const FieldReader rscale[3] = {reader("scale_0"), reader("scale_1"), reader("scale_2")};
    const FieldReader rrot[4] = {reader("rot_0"), reader("rot_1"), reader("rot_2"),
                                 reader("rot_3")};
    std::vector<FieldReader> rrest;
    rrest.reserve(rest_count);
    for (int i = 0; i < rest_count; ++i) rrest.emplace_back(reader("f_rest_" + std::to_string(i)));

    std::vector<unsigned char> raw(header.vertex_stride * header.vertex_count);
    in.seekg(header.data_start);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size())
        throw FormatError(label + ": truncated vertex data");

    GaussianScene scene;
    scene.scene_id = path.parent_path().filename().string();
    if (scene.scene_id.empty()) scene.scene_id = path.stem().string();
    scene.source_path = path.string();
    scene.primitives.resize(header.vertex_count);

    for (std::size_t i = 0; i < header.vertex_count; ++i) {
        const unsigned char* rec = raw.data() + i * header.vertex_stride;
        GaussianPrimitive& g = scene.primitives[i];

        g.position = {rx.read(rec), ry.read(rec), rz.read(rec)};
        g.scale = {std::exp(rscale[0].read(rec)), std::exp(rscale[1].read(rec)),
                   std::exp(rscale[2].read(rec))};
        g.opacity = sigmoid(ropacity.read(rec));

        Eigen::Vector4d q(rrot[0].read(rec), rrot[1].read(rec), rrot[2].read(rec),
                          rrot[3].read(rec));
        const double norm = q.norm();
        if (!(norm > 1e-12))
            throw DataError(label + ": degenerate quaternion at primitive " + std::to_string(i));
        // Skip the division when already unit to float precision; keeps
        // save/load round trips bit-stable.
        if (std::abs(norm - 1.0) > 5e-7) q /= norm;
        g.rotation = Eigen::Quaterniond(q[0], q[1], q[2], q[3]);

        for (int c = 0; c < 3; ++c) g.sh_coeffs[0][c] = rdc[c].read(rec);
        for (int k = 1; k < kShCoeffCount; ++k) g.sh_coeffs[k].setZero();
        // File layout is channel-major: f_rest_[c * rest_per_channel + (k-1)].
        for (int c = 0; c < 3; ++c)
            for (int k = 1; k <= rest_per_channel; ++k)
                g.sh_coeffs[k][c] = rrest[c * rest_per_channel + (k - 1)].read(rec);

        const bool finite = g.position.allFinite() && g.scale.allFinite() &&
                            std::isfinite(g.opacity) && g.rotation.coeffs().allFinite() &&
                            [&] {
                                for (const auto& coeff : g.sh_coeffs)
                                    if (!coeff.allFinite()) return false;
                                return true;
                            }();
        if (!finite)
            throw DataError(label + ": non-finite value at primitive " + std::to_string(i));
    }

    if (scene.primitives.empty()) throw FormatError(label + ": scene has no primitives");
    scene.recompute_bounds();
    return scene;
}

void save_scene(const GaussianScene& scene, const std::filesystem::path& path) {
    constexpr int kRest = (kShCoeffCount - 1) * 3;

    std::ostringstream header;
    header << "ply\nformat binary_little_endian 1.0\n"
           << "element vertex " << scene.primitives.size() << "\n";
    for (const char* n : {"x", "y", "z", "nx", "ny", "nz"}) header << "property float " << n << "\n";
    for (int i = 0; i < 3; ++i) header << "property float f_dc_" << i << "\n";
    for (int i = 0; i < kRest; ++i) header << "property float f_rest_" << i << "\n";
    header << "property float opacity\n";
    for (int i = 0; i < 3; ++i) header << "property float scale_" << i << "\n";
    for (int i = 0; i < 4; ++i) header << "property float rot_" << i << "\n";
    header << "end_header\n";

    std::string buf = header.str();
    buf.reserve(buf.size() + scene.primitives.size() * (17 + kRest) * 4);

    for (const auto& g : scene.primitives) {
        for (int a = 0; a < 3; ++a) append_f32(buf, static_cast<float>(g.position[a]));
        for (int a = 0; a < 3; ++a) append_f32(buf, 0.0f);  // normals, unused
        for (int c = 0; c < 3; ++c) append_f32(buf, static_cast<float>(g.sh_coeffs[0][c]));
        for (int c = 0; c < 3; ++c)
            for (int k = 1; k < kShCoeffCount; ++k)
                append_f32(buf, static_cast<float>(g.sh_coeffs[k][c]));
        const double o = std::clamp(g.opacity, 1e-12, 1.0 - 1e-12);
        append_f32(buf, static_cast<float>(std::log(o / (1.0 - o))));
        for (int a = 0; a < 3; ++a)
            append_f32(buf, static_cast<float>(std::log(std::max(g.scale[a], 1e-30))));
        const Eigen::Quaterniond& q = g.rotation;
        append_f32(buf, static_cast<float>(q.w()));
        append_f32(buf, static_cast<float>(q.x()));
        append_f32(buf, static_cast<float>(q.y()));
        append_f32(buf, static_cast<float>(q.z()));
    }

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write scene file: " + path.string());
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw IoError("failed writing scene file: " + path.string());
}

}  // namespace blurforge
