#include "nmfinit/io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace nmfinit {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

bool parse_double(const std::string& token, double& out) {
    const char* begin = token.c_str();
    char* end = nullptr;
    out = std::strtod(begin, &end);
    return end != begin && *end == '\0' && std::isfinite(out);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        const auto first = field.find_first_not_of(" \t\r");
        const auto last = field.find_last_not_of(" \t\r");
        fields.push_back(first == std::string::npos ? std::string()
                                                    : field.substr(first, last - first + 1));
    }
    return fields;
}

}  // namespace

SpMat read_matrix_market(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UnreadableFile("cannot open " + path);

    std::string banner;
    if (!std::getline(in, banner)) throw ParseError(path + ": empty file");
    std::istringstream header(lower(banner));
    std::string magic, object, format, field, symmetry;
    header >> magic >> object >> format >> field >> symmetry;
    if (magic != "%%matrixmarket" || object != "matrix")
        throw ParseError(path + ": not a Matrix Market matrix file");
    if (format != "coordinate")
        throw ParseError(path + ": only coordinate format is supported");
    const bool pattern = field == "pattern";
    if (field != "real" && field != "integer" && !pattern)
        throw ParseError(path + ": unsupported field type '" + field + "'");
    const bool symmetric = symmetry == "symmetric";
    if (symmetry != "general" && !symmetric)
        throw ParseError(path + ": unsupported symmetry '" + symmetry + "'");

    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] != '%') break;
    }
    long long rows = 0, cols = 0, entries = 0;
    {
        std::istringstream sizes(line);
        if (!(sizes >> rows >> cols >> entries) || rows < 0 || cols < 0 || entries < 0)
            throw ParseError(path + ": malformed size line");
    }
    if (symmetric && rows != cols) throw ParseError(path + ": symmetric matrix must be square");

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<size_t>(symmetric ? 2 * entries : entries));
    for (long long k = 0; k < entries; ++k) {
        long long i = 0, j = 0;
        double v = 1.0;
        do {
            if (!std::getline(in, line)) throw ParseError(path + ": truncated entry list");
        } while (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '%');
        std::istringstream entry(line);
        if (!(entry >> i >> j) || (!pattern && !(entry >> v)))
            throw ParseError(path + ": malformed entry");
        if (i < 1 || i > rows || j < 1 || j > cols)
            throw ParseError(path + ": entry index out of range");
        if (!std::isfinite(v)) throw ParseError(path + ": non-finite value");
        triplets.emplace_back(static_cast<Index>(i - 1), static_cast<Index>(j - 1), v);
        if (symmetric && i != j)
            triplets.emplace_back(static_cast<Index>(j - 1), static_cast<Index>(i - 1), v);
    }

    SpMat M(static_cast<Index>(rows), static_cast<Index>(cols));
    M.setFromTriplets(triplets.begin(), triplets.end());
    M.makeCompressed();
    return M;
}

void write_matrix_market(const std::string& path, const DataMatrix& X) {
    std::FILE* out = std::fopen(path.c_str(), "w");
    if (!out) throw UnreadableFile("cannot open " + path + " for writing");
    std::fprintf(out, "%%%%MatrixMarket matrix coordinate real general\n");
    if (X.is_sparse()) {
        const SpMat& S = X.sparse();
        std::fprintf(out, "%lld %lld %lld\n", static_cast<long long>(S.rows()),
                     static_cast<long long>(S.cols()), static_cast<long long>(S.nonZeros()));
        for (Index i = 0; i < S.outerSize(); ++i)
            for (SpMat::InnerIterator it(S, i); it; ++it)
                std::fprintf(out, "%lld %lld %.17g\n", static_cast<long long>(it.row() + 1),
                             static_cast<long long>(it.col() + 1), it.value());
    } else {
        const RowMat& D = X.dense();
        const long long nnz = (D.array() != 0.0).count();
        std::fprintf(out, "%lld %lld %lld\n", static_cast<long long>(D.rows()),
                     static_cast<long long>(D.cols()), nnz);
        for (Index i = 0; i < D.rows(); ++i)
            for (Index j = 0; j < D.cols(); ++j)
                if (D(i, j) != 0.0)
                    std::fprintf(out, "%lld %lld %.17g\n", static_cast<long long>(i + 1),
                                 static_cast<long long>(j + 1), D(i, j));
    }
    std::fclose(out);
}

RowMat read_dense_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UnreadableFile("cannot open " + path);

    std::vector<std::vector<double>> rows;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto fields = split_csv_line(line);
        std::vector<double> row(fields.size());
        bool numeric = true;
        for (size_t i = 0; i < fields.size(); ++i) {
            if (!parse_double(fields[i], row[i])) {
                numeric = false;
                break;
            }
        }
        if (!numeric) {
            if (first) {  // header line
                first = false;
                continue;
            }
            throw ParseError(path + ": non-numeric field outside header");
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw ParseError(path + ": inconsistent column count");
        rows.push_back(std::move(row));
        first = false;
    }
    if (rows.empty()) throw ParseError(path + ": no data rows");

    RowMat M(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
    for (Index i = 0; i < M.rows(); ++i)
        for (Index j = 0; j < M.cols(); ++j) M(i, j) = rows[static_cast<size_t>(i)][static_cast<size_t>(j)];
    return M;
}

void write_dense_csv(const std::string& path, const Mat& M) {
    std::FILE* out = std::fopen(path.c_str(), "w");
    if (!out) throw UnreadableFile("cannot open " + path + " for writing");
    for (Index i = 0; i < M.rows(); ++i) {
        for (Index j = 0; j < M.cols(); ++j)
            std::fprintf(out, "%s%.17g", j == 0 ? "" : ",", M(i, j));
        std::fprintf(out, "\n");
    }
    std::fclose(out);
}

namespace {

// Reads the next header token of a PGM file, skipping whitespace and
// '#'-comments.
std::string pgm_token(std::istream& in) {
    std::string token;
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (!std::isspace(c)) {
            break;
        }
        c = in.get();
    }
    while (c != EOF && !std::isspace(c)) {
        token.push_back(static_cast<char>(c));
        c = in.get();
    }
    return token;
}

long pgm_int(std::istream& in, const std::string& path) {
    const std::string token = pgm_token(in);
    try {
        return std::stol(token);
    } catch (...) {
        throw ParseError(path + ": malformed PGM header");
    }
}

}  // namespace

RowMat read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UnreadableFile("cannot open " + path);

    const std::string magic = pgm_token(in);
    if (magic != "P2" && magic != "P5") throw ParseError(path + ": not a PGM file");
    const long width = pgm_int(in, path);
    const long height = pgm_int(in, path);
    const long maxval = pgm_int(in, path);
    if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 65535)
        throw ParseError(path + ": invalid PGM dimensions");

    RowMat img(height, width);
    if (magic == "P2") {
        for (long i = 0; i < height; ++i)
            for (long j = 0; j < width; ++j) {
                const long v = pgm_int(in, path);
                if (v < 0 || v > maxval) throw ParseError(path + ": pixel out of range");
                img(i, j) = static_cast<double>(v) / static_cast<double>(maxval);
            }
    } else {
        // pgm_token already consumed the single whitespace after maxval
        const int bytes = maxval > 255 ? 2 : 1;
        std::vector<unsigned char> buf(static_cast<size_t>(width) * height * bytes);
        in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
        if (in.gcount() != static_cast<std::streamsize>(buf.size()))
            throw ParseError(path + ": truncated PGM payload");
        size_t k = 0;
        for (long i = 0; i < height; ++i)
            for (long j = 0; j < width; ++j) {
                long v = buf[k++];
                if (bytes == 2) v = (v << 8) | buf[k++];  // big-endian per the spec
                if (v > maxval) throw ParseError(path + ": pixel out of range");
                img(i, j) = static_cast<double>(v) / static_cast<double>(maxval);
            }
    }
    return img;
}

RowMat read_png_gray(const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "rb");
    if (!fp) throw UnreadableFile("cannot open " + path);

    png_byte header[8];
    if (std::fread(header, 1, 8, fp) != 8 || png_sig_cmp(header, 0, 8) != 0) {
        std::fclose(fp);
        throw ParseError(path + ": not a PNG file");
    }

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        if (png) png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(fp);
        throw Error(path + ": libpng initialization failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(fp);
        throw ParseError(path + ": PNG decode error");
    }

    png_init_io(png, fp);
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    // Normalize everything to 8-bit single-channel gray.
    png_set_strip_16(png);
    png_set_strip_alpha(png);
    png_set_palette_to_rgb(png);
    png_set_expand_gray_1_2_4_to_8(png);
    const png_byte color = png_get_color_type(png, info);
    if (color & PNG_COLOR_MASK_COLOR)
        png_set_rgb_to_gray_fixed(png, 1 /*silent*/, -1, -1);
    png_read_update_info(png, info);

    const png_uint_32 width = png_get_image_width(png, info);
    const png_uint_32 height = png_get_image_height(png, info);
    std::vector<png_byte> data(static_cast<size_t>(width) * height);
    std::vector<png_bytep> row_ptrs(height);
    for (png_uint_32 i = 0; i < height; ++i) row_ptrs[i] = data.data() + static_cast<size_t>(i) * width;
    png_read_image(png, row_ptrs.data());
    png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);

    RowMat img(static_cast<Index>(height), static_cast<Index>(width));
    for (Index i = 0; i < img.rows(); ++i)
        for (Index j = 0; j < img.cols(); ++j)
            img(i, j) = static_cast<double>(data[static_cast<size_t>(i) * width +
                                                 static_cast<size_t>(j)]) /
                        255.0;
    return img;
}

}  // namespace nmfinit
