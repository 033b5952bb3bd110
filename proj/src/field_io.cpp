#include "mixlap/field_io.hpp"

#include "mixlap/errors.hpp"

#include <json.hpp>

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace mixlap::spectral {

namespace {

std::uint64_t to_little_endian(std::uint64_t bits) {
    if constexpr (std::endian::native == std::endian::big) {
        std::uint64_t out = 0;
        for (int i = 0; i < 8; ++i) out |= ((bits >> (8 * i)) & 0xffU) << (8 * (7 - i));
        return out;
    }
    return bits;
}

} // namespace

void write_field(const RealField& field, const std::filesystem::path& path) {
    field.validate();
    nlohmann::json header;
    header["n"] = field.grid.n;
    header["L"] = field.grid.L;
    header["N"] = field.grid.N;
    header["dtype"] = "f64le";
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    out << header.dump() << '\n';
    for (double v : field.data) {
        std::uint64_t bits = 0;
        std::memcpy(&bits, &v, sizeof bits);
        bits = to_little_endian(bits);
        out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
    }
    if (!out) {
        throw std::runtime_error("write failed for " + path.string());
    }
}

RealField read_field(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw StructuralError("cannot open field file " + path.string());
    }
    std::string line;
    std::getline(in, line);
    GridSpec grid;
    try {
        const nlohmann::json header = nlohmann::json::parse(line);
        if (header.value("dtype", std::string{"f64le"}) != "f64le") {
            throw StructuralError(path.string() + ": unsupported dtype");
        }
        grid = {header.at("n").get<int>(), header.at("L").get<double>(), header.at("N").get<int>()};
    } catch (const nlohmann::json::exception& e) {
        throw StructuralError(path.string() + ": malformed header (" + e.what() + ")");
    }
    grid.validate();
    RealField field(grid);
    for (double& v : field.data) {
        std::uint64_t bits = 0;
        in.read(reinterpret_cast<char*>(&bits), sizeof bits);
        if (!in) {
            throw StructuralError(path.string() + ": truncated payload");
        }
        bits = to_little_endian(bits);
        std::memcpy(&v, &bits, sizeof v);
    }
    field.validate();
    return field;
}

void write_axis_slice_csv(const RealField& field, int axis, std::size_t through,
                          const std::filesystem::path& path) {
    if (axis < 0 || axis >= field.grid.n) {
        throw DomainError("slice axis out of range");
    }
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    int j[3] = {0, 0, 0};
    field.unravel(through, j);
    out << "x,value\n";
    char buffer[96];
    for (int k = 0; k < field.grid.N; ++k) {
        j[axis] = k;
        std::snprintf(buffer, sizeof buffer, "%.17g,%.17g\n", field.grid.coordinate(k),
                      field.data[field.index(j)]);
        out << buffer;
    }
}

} // namespace mixlap::spectral
