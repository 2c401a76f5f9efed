#include "vrec/image_io.hpp"

#include <png.h>

#include <cctype>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>

#include "vrec/log.hpp"

namespace vrec {

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
    if (s.size() < suffix.size()) return false;
    std::string tail = s.substr(s.size() - suffix.size());
    for (auto& c : tail) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return tail == suffix;
}

// Reads the next PGM header token, skipping whitespace and '#' comments.
std::string next_token(std::istream& in) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {}
            continue;
        }
        if (std::isspace(c)) continue;
        tok.push_back(static_cast<char>(c));
        while ((c = in.peek()) != EOF && !std::isspace(c) && c != '#')
            tok.push_back(static_cast<char>(in.get()));
        return tok;
    }
    throw ParseError("unexpected end of PGM header");
}

GrayImage load_pgm(std::istream& in) {
    std::string magic = next_token(in);
    if (magic != "P5" && magic != "P2") throw ParseError("not a PGM file (expected P2/P5)");
    int w = std::stoi(next_token(in));
    int h = std::stoi(next_token(in));
    int maxval = std::stoi(next_token(in));
    if (w <= 0 || h <= 0) throw ParseError("PGM: bad dimensions");
    if (maxval <= 0 || maxval > 65535) throw ParseError("PGM: bad maxval");
    int depth = maxval > 255 ? 16 : 8;
    GrayImage img(w, h, depth);
    if (magic == "P2") {
        for (auto& px : img.data()) px = static_cast<uint16_t>(std::stoi(next_token(in)));
    } else {
        in.get();  // single whitespace after maxval
        if (depth == 8) {
            std::vector<uint8_t> raw(img.size());
            in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
            if (!in) throw ParseError("PGM: truncated pixel data");
            for (size_t i = 0; i < raw.size(); ++i) img.data()[i] = raw[i];
        } else {
            std::vector<uint8_t> raw(img.size() * 2);
            in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
            if (!in) throw ParseError("PGM: truncated pixel data");
            for (size_t i = 0; i < img.size(); ++i)
                img.data()[i] = static_cast<uint16_t>((raw[2 * i] << 8) | raw[2 * i + 1]);
        }
    }
    return img;
}

void save_pgm(const GrayImage& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    int maxval = img.levels() - 1;
    out << "P5\n" << img.width() << " " << img.height() << "\n" << maxval << "\n";
    if (img.depth() == 8) {
        std::vector<uint8_t> raw(img.size());
        for (size_t i = 0; i < raw.size(); ++i) raw[i] = static_cast<uint8_t>(img.data()[i]);
        out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    } else {
        std::vector<uint8_t> raw(img.size() * 2);
        for (size_t i = 0; i < img.size(); ++i) {
            raw[2 * i] = static_cast<uint8_t>(img.data()[i] >> 8);
            raw[2 * i + 1] = static_cast<uint8_t>(img.data()[i] & 0xff);
        }
        out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    }
    if (!out) throw IoError("write failed: " + path);
}

struct FileCloser {
    void operator()(std::FILE* f) const { if (f) std::fclose(f); }
};

GrayImage load_png(const std::string& path) {
    std::unique_ptr<std::FILE, FileCloser> fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw IoError("cannot open: " + path);
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("libpng init failed");
    }
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw ParseError("PNG decode failed: " + path);
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);
    png_uint_32 w = png_get_image_width(png, info);
    png_uint_32 h = png_get_image_height(png, info);
    int bit_depth = png_get_bit_depth(png, info);
    int color = png_get_color_type(png, info);
    if (color != PNG_COLOR_TYPE_GRAY) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw ParseError("PNG: only grayscale images are supported: " + path);
    }
    if (bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (bit_depth == 16) png_set_swap(png);  // stored big-endian
    png_read_update_info(png, info);
    int depth = bit_depth == 16 ? 16 : 8;
    GrayImage img(static_cast<int>(w), static_cast<int>(h), depth);
    std::vector<std::vector<uint8_t>> buf(h, std::vector<uint8_t>(png_get_rowbytes(png, info)));
    rows.resize(h);
    for (png_uint_32 y = 0; y < h; ++y) rows[y] = buf[y].data();
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    for (png_uint_32 y = 0; y < h; ++y) {
        if (depth == 8) {
            for (png_uint_32 x = 0; x < w; ++x) img.at(static_cast<int>(x), static_cast<int>(y)) = buf[y][x];
        } else {
            auto* p16 = reinterpret_cast<const uint16_t*>(buf[y].data());
            for (png_uint_32 x = 0; x < w; ++x) img.at(static_cast<int>(x), static_cast<int>(y)) = p16[x];
        }
    }
    return img;
}

void save_png(const GrayImage& img, const std::string& path) {
    std::unique_ptr<std::FILE, FileCloser> fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw IoError("cannot open for writing: " + path);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw IoError("libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("PNG encode failed: " + path);
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(img.width()),
                 static_cast<png_uint_32>(img.height()), img.depth(), PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    if (img.depth() == 16) png_set_swap(png);
    std::vector<std::vector<uint8_t>> buf(img.height());
    std::vector<png_bytep> rows(img.height());
    for (int y = 0; y < img.height(); ++y) {
        if (img.depth() == 8) {
            buf[y].resize(img.width());
            for (int x = 0; x < img.width(); ++x) buf[y][x] = static_cast<uint8_t>(img.at(x, y));
        } else {
            buf[y].resize(static_cast<size_t>(img.width()) * 2);
            auto* p16 = reinterpret_cast<uint16_t*>(buf[y].data());
            for (int x = 0; x < img.width(); ++x) p16[x] = img.at(x, y);
        }
        rows[y] = buf[y].data();
    }
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

}  // namespace

GrayImage load_image(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    char sig[2] = {0, 0};
    in.read(sig, 2);
    in.seekg(0);
    if (sig[0] == 'P' && (sig[1] == '2' || sig[1] == '5')) return load_pgm(in);
    in.close();
    return load_png(path);
}

void save_image(const GrayImage& img, const std::string& path) {
    if (ends_with(path, ".png")) {
        save_png(img, path);
    } else {
        save_pgm(img, path);
    }
}

BinaryMask load_mask(const std::string& path) {
    GrayImage img = load_image(path);
    BinaryMask mask(img.width(), img.height());
    int half = img.levels() / 2;
    for (size_t i = 0; i < img.size(); ++i) mask.data()[i] = img.data()[i] >= half ? 1 : 0;
    return mask;
}

void save_mask(const BinaryMask& mask, const std::string& path) {
    GrayImage img(mask.width(), mask.height(), 8);
    for (size_t i = 0; i < mask.size(); ++i) img.data()[i] = mask.data()[i] ? 255 : 0;
    save_image(img, path);
}

}  // namespace vrec
