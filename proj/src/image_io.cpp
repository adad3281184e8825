// Copyright (C) 2026 The hmbsynth Authors
// SPDX-License-Identifier: Apache-2.0

#include "hmbsynth/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <string>

// jpeglib.h needs size_t and FILE declared first.
#include <jpeglib.h>

#include "hmbsynth/error.hpp"

namespace hmbsynth {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const noexcept {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode, ErrorCode on_fail) {
    FilePtr f(std::fopen(path.c_str(), mode));
    if (!f) fail(on_fail, "cannot open '" + path.string() + "': " + std::strerror(errno));
    return f;
}

struct RawRaster {
    int height = 0;
    int width = 0;
    int channels = 0;
    int bit_depth = 0;
    std::vector<std::uint16_t> samples;  // interleaved
};

struct PngErrorState {
    std::jmp_buf jump;
    char message[256] = {};
};

void png_error_fn(png_structp png, png_const_charp msg) {
    auto* state = static_cast<PngErrorState*>(png_get_error_ptr(png));
    std::snprintf(state->message, sizeof(state->message), "%s", msg);
    std::longjmp(state->jump, 1);
}

void png_warning_fn(png_structp, png_const_charp) {}

RawRaster read_png_raw(std::FILE* file, const std::string& name) {
    PngErrorState state;
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &state, png_error_fn, png_warning_fn);
    if (!png) fail(ErrorCode::DecodeError, "libpng init failed");
    png_infop info = png_create_info_struct(png);
    RawRaster raster;
    std::vector<png_bytep> rows;
    std::vector<std::uint8_t> buffer;
    bool unsupported_depth = false;
    if (setjmp(state.jump)) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(ErrorCode::DecodeError, "corrupt PNG '" + name + "': " + state.message);
    }
    png_init_io(png, file);
    png_read_info(png, info);
    const int color_type = png_get_color_type(png, info);
    const int depth = png_get_bit_depth(png, info);
    if (color_type == PNG_COLOR_TYPE_PALETTE) {
        png_set_palette_to_rgb(png);
    } else if (depth < 8) {
        unsupported_depth = true;
    }
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (!unsupported_depth) {
        png_read_update_info(png, info);
        raster.width = static_cast<int>(png_get_image_width(png, info));
        raster.height = static_cast<int>(png_get_image_height(png, info));
        raster.channels = png_get_channels(png, info);
        raster.bit_depth = png_get_bit_depth(png, info);
        const std::size_t rowbytes = png_get_rowbytes(png, info);
        buffer.resize(rowbytes * raster.height);
        rows.resize(raster.height);
        for (int y = 0; y < raster.height; ++y) rows[y] = buffer.data() + rowbytes * y;
        png_read_image(png, rows.data());
        png_read_end(png, nullptr);
    }
    png_destroy_read_struct(&png, &info, nullptr);
    if (unsupported_depth) {
        fail(ErrorCode::UnsupportedBitDepth, "'" + name + "' has " + std::to_string(depth) + "-bit samples");
    }
    const std::size_t count = static_cast<std::size_t>(raster.width) * raster.height * raster.channels;
    raster.samples.resize(count);
    if (raster.bit_depth == 16) {
        for (std::size_t i = 0; i < count; ++i) {
            raster.samples[i] = static_cast<std::uint16_t>((buffer[2 * i] << 8) | buffer[2 * i + 1]);
        }
    } else {
        std::copy(buffer.begin(), buffer.begin() + static_cast<std::ptrdiff_t>(count), raster.samples.begin());
    }
    return raster;
}

void write_png_raw(const std::filesystem::path& path, const RawRaster& raster) {
    FilePtr file = open_file(path, "wb", ErrorCode::IoError);
    PngErrorState state;
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &state, png_error_fn, png_warning_fn);
    if (!png) fail(ErrorCode::IoError, "libpng init failed");
    png_infop info = png_create_info_struct(png);
    const int bytes_per_sample = raster.bit_depth == 16 ? 2 : 1;
    const std::size_t rowbytes = static_cast<std::size_t>(raster.width) * raster.channels * bytes_per_sample;
    std::vector<std::uint8_t> buffer(rowbytes * raster.height);
    for (std::size_t i = 0; i < raster.samples.size(); ++i) {
        if (bytes_per_sample == 2) {
            buffer[2 * i] = static_cast<std::uint8_t>(raster.samples[i] >> 8);
            buffer[2 * i + 1] = static_cast<std::uint8_t>(raster.samples[i] & 0xFF);
        } else {
            buffer[i] = static_cast<std::uint8_t>(raster.samples[i]);
        }
    }
    std::vector<png_bytep> rows(raster.height);
    for (int y = 0; y < raster.height; ++y) rows[y] = buffer.data() + rowbytes * y;
    if (setjmp(state.jump)) {
        png_destroy_write_struct(&png, &info);
        fail(ErrorCode::IoError, "PNG write failed for '" + path.string() + "': " + state.message);
    }
    png_init_io(png, file.get());
    const int color_type = raster.channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY;
    png_set_IHDR(png, info, raster.width, raster.height, raster.bit_depth, color_type, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    if (std::fflush(file.get()) != 0) fail(ErrorCode::IoError, "flush failed for '" + path.string() + "'");
}

std::vector<std::uint8_t> read_all(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::NotFound, "cannot open '" + path.string() + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void require_exists(const std::filesystem::path& path) {
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec)) fail(ErrorCode::NotFound, "no such file '" + path.string() + "'");
}

struct JpegErrorState {
    jpeg_error_mgr base;
    std::jmp_buf jump;
    char message[JMSG_LENGTH_MAX] = {};
};

void jpeg_error_exit(j_common_ptr cinfo) {
    auto* state = reinterpret_cast<JpegErrorState*>(cinfo->err);
    (*cinfo->err->format_message)(cinfo, state->message);
    std::longjmp(state->jump, 1);
}

void jpeg_silent(j_common_ptr, int) {}

}  // namespace

std::uint8_t quantize_u8(float value) noexcept {
    const double v = std::clamp(static_cast<double>(value), 0.0, 1.0);
    return static_cast<std::uint8_t>(std::floor(v * 255.0 + 0.5));
}

Image load_image(const std::filesystem::path& path) {
    require_exists(path);
    FilePtr file = open_file(path, "rb", ErrorCode::NotFound);
    unsigned char sig[8] = {};
    const std::size_t got = std::fread(sig, 1, sizeof(sig), file.get());
    if (got >= 3 && sig[0] == 0xFF && sig[1] == 0xD8 && sig[2] == 0xFF) {
        file.reset();
        const auto bytes = read_all(path);
        return decode_jpeg(bytes);
    }
    if (got != 8 || png_sig_cmp(sig, 0, 8) != 0) {
        fail(ErrorCode::DecodeError, "'" + path.string() + "' is neither PNG nor JPEG");
    }
    std::rewind(file.get());
    const RawRaster raw = read_png_raw(file.get(), path.string());
    Image img(raw.height, raw.width);
    const double scale = raw.bit_depth == 16 ? 65535.0 : 255.0;
    const std::size_t n = img.plane_size();
    const bool gray = raw.channels <= 2;
    for (std::size_t i = 0; i < n; ++i) {
        for (int c = 0; c < Image::kChannels; ++c) {
            const std::uint16_t s = raw.samples[i * raw.channels + (gray ? 0 : c)];
            img.plane(c)[i] = static_cast<float>(s / scale);
        }
    }
    return img;
}

void save_image(const Image& image, const std::filesystem::path& path, ImageFormat format) {
    if (format.kind == ImageFormat::Kind::Jpeg) {
        const auto bytes = encode_jpeg(image, format.jpeg_quality);
        std::ofstream out(path, std::ios::binary);
        if (!out) fail(ErrorCode::IoError, "cannot open '" + path.string() + "' for writing");
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!out) fail(ErrorCode::IoError, "write failed for '" + path.string() + "'");
        return;
    }
    RawRaster raw{image.height(), image.width(), 3, 8, {}};
    const std::size_t n = image.plane_size();
    raw.samples.resize(n * 3);
    for (std::size_t i = 0; i < n; ++i) {
        for (int c = 0; c < 3; ++c) raw.samples[i * 3 + c] = quantize_u8(image.plane(c)[i]);
    }
    write_png_raw(path, raw);
}

PartLabelMap load_label_map(const std::filesystem::path& path, const LabelLegend& legend) {
    require_exists(path);
    FilePtr file = open_file(path, "rb", ErrorCode::NotFound);
    const RawRaster raw = read_png_raw(file.get(), path.string());
    if (raw.channels != 1 || raw.bit_depth != 8) {
        fail(ErrorCode::DecodeError, "label map '" + path.string() + "' must be 8-bit single-channel");
    }
    std::vector<std::uint8_t> labels(raw.samples.begin(), raw.samples.end());
    return PartLabelMap(raw.height, raw.width, std::move(labels), legend);
}

void save_label_map(const PartLabelMap& labels, const std::filesystem::path& path) {
    RawRaster raw{labels.height(), labels.width(), 1, 8, {}};
    raw.samples.assign(labels.labels().begin(), labels.labels().end());
    write_png_raw(path, raw);
}

void save_mask(const BinaryMask& mask, const std::filesystem::path& path) {
    RawRaster raw{mask.height(), mask.width(), 1, 8, {}};
    raw.samples.resize(mask.size());
    std::transform(mask.values().begin(), mask.values().end(), raw.samples.begin(),
                   [](std::uint8_t v) { return static_cast<std::uint16_t>(v ? 255 : 0); });
    write_png_raw(path, raw);
}

BinaryMask load_mask(const std::filesystem::path& path) {
    require_exists(path);
    FilePtr file = open_file(path, "rb", ErrorCode::NotFound);
    const RawRaster raw = read_png_raw(file.get(), path.string());
    if (raw.channels != 1) fail(ErrorCode::DecodeError, "mask '" + path.string() + "' must be single-channel");
    BinaryMask mask(raw.height, raw.width);
    const std::uint16_t half = raw.bit_depth == 16 ? 32768 : 128;
    for (std::size_t i = 0; i < mask.size(); ++i) mask.values()[i] = raw.samples[i] >= half ? 1 : 0;
    return mask;
}

void save_field(const Field& field, const std::filesystem::path& path, bool sixteen_bit, bool max_normalize) {
    RawRaster raw{field.height(), field.width(), 1, sixteen_bit ? 16 : 8, {}};
    float peak = 1.0f;
    if (max_normalize) {
        peak = *std::max_element(field.values().begin(), field.values().end());
        if (!(peak > 0.0f)) peak = 1.0f;
    }
    const double levels = sixteen_bit ? 65535.0 : 255.0;
    raw.samples.resize(field.size());
    for (std::size_t i = 0; i < field.size(); ++i) {
        const double v = std::clamp(static_cast<double>(field.values()[i]) / peak, 0.0, 1.0);
        raw.samples[i] = static_cast<std::uint16_t>(std::floor(v * levels + 0.5));
    }
    write_png_raw(path, raw);
}

std::vector<std::uint8_t> encode_jpeg(const Image& image, int quality) {
    if (quality < 1 || quality > 100) {
        fail(ErrorCode::EncodeError, "JPEG quality " + std::to_string(quality) + " outside 1..100");
    }
    const int h = image.height();
    const int w = image.width();
    std::vector<std::uint8_t> rgb(static_cast<std::size_t>(h) * w * 3);
    const std::size_t n = image.plane_size();
    for (std::size_t i = 0; i < n; ++i) {
        for (int c = 0; c < 3; ++c) rgb[i * 3 + c] = quantize_u8(image.plane(c)[i]);
    }

    jpeg_compress_struct cinfo{};
    JpegErrorState err;
    cinfo.err = jpeg_std_error(&err.base);
    err.base.error_exit = jpeg_error_exit;
    err.base.emit_message = jpeg_silent;
    unsigned char* out_buf = nullptr;
    unsigned long out_size = 0;
    if (setjmp(err.jump)) {
        jpeg_destroy_compress(&cinfo);
        std::free(out_buf);
        fail(ErrorCode::EncodeError, err.message);
    }
    jpeg_create_compress(&cinfo);
    jpeg_mem_dest(&cinfo, &out_buf, &out_size);
    cinfo.image_width = static_cast<JDIMENSION>(w);
    cinfo.image_height = static_cast<JDIMENSION>(h);
    cinfo.input_components = 3;
    cinfo.in_color_space = JCS_RGB;
    jpeg_set_defaults(&cinfo);
    jpeg_set_quality(&cinfo, quality, TRUE);
    cinfo.dct_method = JDCT_ISLOW;
    cinfo.optimize_coding = FALSE;
    const int luma_factor = quality < 90 ? 2 : 1;
    cinfo.comp_info[0].h_samp_factor = luma_factor;
    cinfo.comp_info[0].v_samp_factor = luma_factor;
    for (int c = 1; c < 3; ++c) {
        cinfo.comp_info[c].h_samp_factor = 1;
        cinfo.comp_info[c].v_samp_factor = 1;
    }
    jpeg_start_compress(&cinfo, TRUE);
    while (cinfo.next_scanline < cinfo.image_height) {
        JSAMPROW row = rgb.data() + static_cast<std::size_t>(cinfo.next_scanline) * w * 3;
        jpeg_write_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_compress(&cinfo);
    std::vector<std::uint8_t> bytes(out_buf, out_buf + out_size);
    jpeg_destroy_compress(&cinfo);
    std::free(out_buf);
    return bytes;
}

Image decode_jpeg(std::span<const std::uint8_t> bytes) {
    jpeg_decompress_struct cinfo{};
    JpegErrorState err;
    cinfo.err = jpeg_std_error(&err.base);
    err.base.error_exit = jpeg_error_exit;
    err.base.emit_message = jpeg_silent;
    std::vector<std::uint8_t> rgb;
    if (setjmp(err.jump)) {
        jpeg_destroy_decompress(&cinfo);
        fail(ErrorCode::DecodeError, err.message);
    }
    jpeg_create_decompress(&cinfo);
    jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = JCS_RGB;
    cinfo.dct_method = JDCT_ISLOW;
    jpeg_start_decompress(&cinfo);
    const int w = static_cast<int>(cinfo.output_width);
    const int h = static_cast<int>(cinfo.output_height);
    rgb.resize(static_cast<std::size_t>(w) * h * 3);
    while (cinfo.output_scanline < cinfo.output_height) {
        JSAMPROW row = rgb.data() + static_cast<std::size_t>(cinfo.output_scanline) * w * 3;
        jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    Image img(h, w);
    const std::size_t n = img.plane_size();
    for (std::size_t i = 0; i < n; ++i) {
        for (int c = 0; c < 3; ++c) img.plane(c)[i] = static_cast<float>(rgb[i * 3 + c] / 255.0);
    }
    return img;
}

}  // namespace hmbsynth
