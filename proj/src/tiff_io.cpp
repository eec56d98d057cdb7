#include "convbeers/tiff_io.hpp"

#include <tiffio.h>

#include <algorithm>
#include <cstring>
#include <limits>
#include <memory>
#include <string>

#include "convbeers/error.hpp"
#include "convbeers/patches.hpp"

namespace convbeers {
namespace {

struct TiffCloser {
  void operator()(TIFF* t) const noexcept { TIFFClose(t); }
};
using TiffHandle = std::unique_ptr<TIFF, TiffCloser>;

void silence_libtiff() {
  static const bool once = [] {
    TIFFSetWarningHandler(nullptr);
    TIFFSetErrorHandler(nullptr);
    return true;
  }();
  (void)once;
}

TiffHandle open_tiff(const std::filesystem::path& path, const char* mode) {
  silence_libtiff();
  TiffHandle tif(TIFFOpen(path.string().c_str(), mode));
  if (!tif) {
    throw Error(ErrorCode::io, "cannot open TIFF '" + path.string() + "'");
  }
  return tif;
}

// Interleaved samples, one std::uint16_t per sample, widened from 8 bits when
// needed (values kept as stored).
struct SampleRaster {
  int width = 0;
  int height = 0;
  int spp = 1;
  int bits = 16;
  std::vector<std::uint16_t> samples;
};

SampleRaster read_samples(const std::filesystem::path& path) {
  TiffHandle tif = open_tiff(path, "r");
  std::uint32_t w = 0, h = 0;
  std::uint16_t bits = 1, spp = 1, fmt = SAMPLEFORMAT_UINT, planar = PLANARCONFIG_CONTIG;
  TIFFGetField(tif.get(), TIFFTAG_IMAGEWIDTH, &w);
  TIFFGetField(tif.get(), TIFFTAG_IMAGELENGTH, &h);
  TIFFGetFieldDefaulted(tif.get(), TIFFTAG_BITSPERSAMPLE, &bits);
  TIFFGetFieldDefaulted(tif.get(), TIFFTAG_SAMPLESPERPIXEL, &spp);
  TIFFGetFieldDefaulted(tif.get(), TIFFTAG_SAMPLEFORMAT, &fmt);
  TIFFGetFieldDefaulted(tif.get(), TIFFTAG_PLANARCONFIG, &planar);

  const std::string name = path.string();
  require(fmt == SAMPLEFORMAT_UINT, ErrorCode::format,
          name + ": only unsigned integer samples are supported");
  require(bits == 8 || bits == 16, ErrorCode::format,
          name + ": unsupported bits per sample " + std::to_string(bits));
  require(spp == 1 || spp == 3, ErrorCode::format,
          name + ": unsupported samples per pixel " + std::to_string(spp));
  require(w > 0 && h > 0, ErrorCode::format, name + ": empty raster");
  constexpr std::uint64_t kMaxPixels = std::uint64_t{1} << 31;
  require(static_cast<std::uint64_t>(w) * h * spp < kMaxPixels &&
              w <= static_cast<std::uint32_t>(std::numeric_limits<int>::max()) &&
              h <= static_cast<std::uint32_t>(std::numeric_limits<int>::max()),
          ErrorCode::format, name + ": dimension overflow");

  SampleRaster out;
  out.width = static_cast<int>(w);
  out.height = static_cast<int>(h);
  out.spp = spp;
  out.bits = bits;
  out.samples.assign(static_cast<std::size_t>(w) * h * spp, 0);

  const int bytes = bits / 8;
  auto store = [&](const unsigned char* src, std::size_t count, std::size_t dst_pixel,
                   int plane) {
    // count samples from src; contiguous when plane < 0, else one plane.
    for (std::size_t i = 0; i < count; ++i) {
      std::uint16_t v;
      if (bytes == 1) {
        v = src[i];
      } else {
        std::uint16_t raw;
        std::memcpy(&raw, src + 2 * i, 2);
        v = raw;
      }
      if (plane < 0)
        out.samples[dst_pixel * spp + i] = v;
      else
        out.samples[(dst_pixel + i) * spp + plane] = v;
    }
  };

  const int nplanes = planar == PLANARCONFIG_SEPARATE ? spp : 1;
  const std::size_t px_samples = planar == PLANARCONFIG_SEPARATE ? 1 : spp;

  if (TIFFIsTiled(tif.get())) {
    std::uint32_t tw = 0, th = 0;
    TIFFGetField(tif.get(), TIFFTAG_TILEWIDTH, &tw);
    TIFFGetField(tif.get(), TIFFTAG_TILELENGTH, &th);
    std::vector<unsigned char> buf(static_cast<std::size_t>(TIFFTileSize(tif.get())));
    for (int plane = 0; plane < nplanes; ++plane) {
      for (std::uint32_t ty = 0; ty < h; ty += th) {
        for (std::uint32_t tx = 0; tx < w; tx += tw) {
          if (TIFFReadTile(tif.get(), buf.data(), tx, ty, 0,
                           static_cast<std::uint16_t>(plane)) < 0)
            throw Error(ErrorCode::format, name + ": tile read failed");
          const std::uint32_t cw = std::min(tw, w - tx);
          const std::uint32_t ch = std::min(th, h - ty);
          for (std::uint32_t r = 0; r < ch; ++r) {
            const unsigned char* src = buf.data() + static_cast<std::size_t>(r) * tw * px_samples * bytes;
            const std::size_t dst = static_cast<std::size_t>(ty + r) * w + tx;
            store(src, cw * px_samples, dst, nplanes > 1 ? plane : -1);
          }
        }
      }
    }
  } else {
    const tmsize_t scanline = TIFFScanlineSize(tif.get());
    std::vector<unsigned char> buf(static_cast<std::size_t>(scanline));
    for (int plane = 0; plane < nplanes; ++plane) {
      for (std::uint32_t y = 0; y < h; ++y) {
        if (TIFFReadScanline(tif.get(), buf.data(), y,
                             static_cast<std::uint16_t>(plane)) < 0)
          throw Error(ErrorCode::format, name + ": scanline read failed");
        store(buf.data(), w * px_samples, static_cast<std::size_t>(y) * w,
              nplanes > 1 ? plane : -1);
      }
    }
  }
  return out;
}

}  // namespace

DnRaster read_dn_raster(const std::filesystem::path& path) {
  SampleRaster s = read_samples(path);
  require(s.spp == 1 && s.bits == 16, ErrorCode::format,
          path.string() + ": DN raster must be single-band 16-bit");
  return DnRaster{s.width, s.height, std::move(s.samples)};
}

void write_dn_raster(const DnRaster& raster, const std::filesystem::path& path) {
  require(raster.dn.size() == static_cast<std::size_t>(raster.width) * raster.height,
          ErrorCode::dimension_mismatch, "DN raster size mismatch");
  // "l" forces little-endian regardless of host byte order.
  TiffHandle tif = open_tiff(path, "wl");
  TIFF* t = tif.get();
  TIFFSetField(t, TIFFTAG_IMAGEWIDTH, static_cast<std::uint32_t>(raster.width));
  TIFFSetField(t, TIFFTAG_IMAGELENGTH, static_cast<std::uint32_t>(raster.height));
  TIFFSetField(t, TIFFTAG_BITSPERSAMPLE, 16);
  TIFFSetField(t, TIFFTAG_SAMPLESPERPIXEL, 1);
  TIFFSetField(t, TIFFTAG_SAMPLEFORMAT, SAMPLEFORMAT_UINT);
  TIFFSetField(t, TIFFTAG_PHOTOMETRIC, PHOTOMETRIC_MINISBLACK);
  TIFFSetField(t, TIFFTAG_PLANARCONFIG, PLANARCONFIG_CONTIG);
  TIFFSetField(t, TIFFTAG_COMPRESSION, COMPRESSION_NONE);
  TIFFSetField(t, TIFFTAG_ROWSPERSTRIP, TIFFDefaultStripSize(t, 0));
  std::vector<std::uint16_t> row(static_cast<std::size_t>(raster.width));
  for (int y = 0; y < raster.height; ++y) {
    std::copy_n(raster.dn.begin() + static_cast<std::ptrdiff_t>(y) * raster.width,
                raster.width, row.begin());
    if (TIFFWriteScanline(t, row.data(), static_cast<std::uint32_t>(y), 0) < 0)
      throw Error(ErrorCode::io, "failed writing '" + path.string() + "'");
  }
}

DnRaster to_dn_raster(const PanImage& img, const RadiometricScale& scale,
                      std::size_t* clamped) {
  scale.validate();
  DnRaster out{img.width(), img.height(), {}};
  out.dn.resize(img.size());
  std::size_t n_clamped = 0;
  const auto px = img.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) {
    bool c = false;
    out.dn[i] = static_cast<std::uint16_t>(scale.to_dn(px[i], &c));
    n_clamped += c ? 1 : 0;
  }
  if (clamped) *clamped = n_clamped;
  return out;
}

PanImage load_tiff(const std::filesystem::path& path, const RadiometricScale& scale) {
  scale.validate();
  SampleRaster s = read_samples(path);
  const double stretch = s.bits == 8 ? static_cast<double>(scale.dn_max) / 255.0 : 1.0;
  const std::size_t n = static_cast<std::size_t>(s.width) * s.height;
  auto band = [&](int b) {
    std::vector<float> px(n);
    for (std::size_t i = 0; i < n; ++i)
      px[i] = static_cast<float>(scale.to_radiance(s.samples[i * s.spp + b] * stretch));
    return PanImage(s.width, s.height, std::move(px));
  };
  if (s.spp == 1) return band(0);
  return rgb_to_pan(band(0), band(1), band(2));
}

SaveReport save_tiff(const PanImage& img, const std::filesystem::path& path,
                     const RadiometricScale& scale) {
  require(!img.empty(), ErrorCode::invalid_argument, "cannot save an empty image");
  SaveReport report;
  write_dn_raster(to_dn_raster(img, scale, &report.clamped), path);
  return report;
}

}  // namespace convbeers

namespace convbeers {

PanImage dn_roundtrip(const PanImage& img, const RadiometricScale& scale) {
  scale.validate();
  const DnRaster r = to_dn_raster(img, scale);
  std::vector<float> px(r.dn.size());
  for (std::size_t i = 0; i < px.size(); ++i)
    px[i] = static_cast<float>(scale.to_radiance(r.dn[i] * 1.0));
  return PanImage(r.width, r.height, std::move(px));
}

}  // namespace convbeers
