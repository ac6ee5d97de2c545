/*
 * Copyright 2026 The lungprep Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "lungprep/dicom.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>

#include "byte_io.hpp"
#include "lungprep/error.hpp"
#include "lungprep/lvol.hpp"

namespace lungprep {
namespace {

constexpr std::uint32_t kUndefinedLength = 0xFFFFFFFF;

constexpr std::uint32_t tag(std::uint16_t group, std::uint16_t element) {
  return (static_cast<std::uint32_t>(group) << 16) | element;
}

constexpr std::uint32_t kTransferSyntaxUid = tag(0x0002, 0x0010);
constexpr std::uint32_t kSliceThickness = tag(0x0018, 0x0050);
constexpr std::uint32_t kImagePosition = tag(0x0020, 0x0032);
constexpr std::uint32_t kRows = tag(0x0028, 0x0010);
constexpr std::uint32_t kColumns = tag(0x0028, 0x0011);
constexpr std::uint32_t kPixelSpacing = tag(0x0028, 0x0030);
constexpr std::uint32_t kBitsAllocated = tag(0x0028, 0x0100);
constexpr std::uint32_t kPixelRepresentation = tag(0x0028, 0x0103);
constexpr std::uint32_t kRescaleIntercept = tag(0x0028, 0x1052);
constexpr std::uint32_t kRescaleSlope = tag(0x0028, 0x1053);
constexpr std::uint32_t kPixelData = tag(0x7FE0, 0x0010);
constexpr std::uint32_t kItem = tag(0xFFFE, 0xE000);
constexpr std::uint32_t kItemDelimiter = tag(0xFFFE, 0xE00D);
constexpr std::uint32_t kSequenceDelimiter = tag(0xFFFE, 0xE0DD);

std::string tag_name(std::uint32_t t) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "(%04X,%04X)", t >> 16, t & 0xFFFF);
  return buf;
}

bool has_long_length(std::string_view vr) {
  static constexpr std::string_view kLong[] = {"OB", "OD", "OF", "OL", "OV", "OW", "SQ",
                                               "SV", "UC", "UN", "UR", "UT", "UV"};
  return std::find(std::begin(kLong), std::end(kLong), vr) != std::end(kLong);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == ' ' || s.back() == '\0')) s.remove_suffix(1);
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  return s;
}

struct Element {
  std::uint32_t tag = 0;
  std::string_view vr;  // empty for implicit VR and item tags
  std::uint32_t length = 0;
  std::span<const std::uint8_t> value;  // empty when length is undefined
};

class DatasetReader {
 public:
  explicit DatasetReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  bool at_end() const { return pos_ >= bytes_.size(); }
  std::size_t position() const { return pos_; }
  void seek(std::size_t pos) { pos_ = pos; }
  void set_explicit(bool e) { explicit_vr_ = e; }

  std::uint32_t peek_tag() const {
    require(4, 0);
    return tag(detail::load_u16(bytes_.data() + pos_), detail::load_u16(bytes_.data() + pos_ + 2));
  }

  /// Reads an element header and, for defined lengths, its value. Undefined
  /// lengths leave the cursor at the start of the nested content.
  Element next(bool force_explicit = false) {
    Element e;
    e.tag = peek_tag();
    const bool is_item = (e.tag >> 16) == 0xFFFE;
    if (is_item || !(explicit_vr_ || force_explicit)) {
      require(8, e.tag);
      e.length = detail::load_u32(bytes_.data() + pos_ + 4);
      pos_ += 8;
    } else {
      require(8, e.tag);
      e.vr = std::string_view(reinterpret_cast<const char*>(bytes_.data() + pos_ + 4), 2);
      if (has_long_length(e.vr)) {
        require(12, e.tag);
        e.length = detail::load_u32(bytes_.data() + pos_ + 8);
        pos_ += 12;
      } else {
        e.length = detail::load_u16(bytes_.data() + pos_ + 6);
        pos_ += 8;
      }
    }
    if (e.length != kUndefinedLength) {
      require(e.length, e.tag);
      e.value = bytes_.subspan(pos_, e.length);
      pos_ += e.length;
    }
    return e;
  }

  /// Skips the content of an undefined-length sequence whose header was
  /// just consumed.
  void skip_undefined_sequence() {
    for (;;) {
      if (at_end()) throw Error(ErrorCode::MalformedElement, "unterminated sequence");
      Element item = next();
      if (item.tag == kSequenceDelimiter) return;
      if (item.tag != kItem) {
        throw Error(ErrorCode::MalformedElement, "expected item in sequence, found " + tag_name(item.tag));
      }
      if (item.length == kUndefinedLength) skip_undefined_item();
    }
  }

 private:
  void skip_undefined_item() {
    for (;;) {
      if (at_end()) throw Error(ErrorCode::MalformedElement, "unterminated item");
      Element e = next();
      if (e.tag == kItemDelimiter) return;
      if (e.length == kUndefinedLength) skip_undefined_sequence();
    }
  }

  void require(std::size_t n, std::uint32_t t) const {
    if (n > bytes_.size() - pos_ || pos_ > bytes_.size()) {
      throw Error(ErrorCode::MalformedElement, "element " + tag_name(t) + " overruns the buffer at offset " +
                                                   std::to_string(pos_));
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
  bool explicit_vr_ = true;
};

std::uint16_t as_u16(const Element& e) {
  if (e.value.size() < 2) throw Error(ErrorCode::MalformedElement, tag_name(e.tag) + " too short for US");
  return detail::load_u16(e.value.data());
}

std::vector<double> as_decimals(const Element& e) {
  std::string_view text(reinterpret_cast<const char*>(e.value.data()), e.value.size());
  std::vector<double> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t end = std::min(text.find('\\', start), text.size());
    std::string_view item = trim(text.substr(start, end - start));
    if (!item.empty() && item.front() == '+') item.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || ptr != item.data() + item.size()) {
      throw Error(ErrorCode::MalformedElement, tag_name(e.tag) + " holds a non-numeric DS value");
    }
    out.push_back(v);
    if (end == text.size()) break;
    start = end + 1;
  }
  return out;
}

double decimal_at(const Element& e, std::size_t index) {
  auto values = as_decimals(e);
  if (values.size() <= index) {
    throw Error(ErrorCode::MalformedElement, tag_name(e.tag) + " has too few values");
  }
  return values[index];
}

bool looks_like_vr(std::span<const std::uint8_t> bytes) {
  return bytes.size() >= 6 && bytes[4] >= 'A' && bytes[4] <= 'Z' && bytes[5] >= 'A' && bytes[5] <= 'Z';
}

}  // namespace

DicomSlice parse_dicom_file(std::span<const std::uint8_t> bytes) {
  std::size_t start = 0;
  if (bytes.size() >= 132 && std::string_view(reinterpret_cast<const char*>(bytes.data() + 128), 4) == "DICM") {
    start = 132;
  }
  DatasetReader reader(bytes);
  reader.seek(start);

  // File meta group: always explicit VR little endian.
  std::optional<std::string> transfer_syntax;
  while (!reader.at_end() && (reader.peek_tag() >> 16) == 0x0002) {
    Element e = reader.next(/*force_explicit=*/true);
    if (e.tag == kTransferSyntaxUid) {
      transfer_syntax = std::string(trim({reinterpret_cast<const char*>(e.value.data()), e.value.size()}));
    }
  }

  bool explicit_vr;
  if (transfer_syntax) {
    if (*transfer_syntax == kExplicitVrLittleEndian) {
      explicit_vr = true;
    } else if (*transfer_syntax == kImplicitVrLittleEndian) {
      explicit_vr = false;
    } else {
      throw Error(ErrorCode::UnsupportedTransferSyntax, *transfer_syntax);
    }
  } else {
    explicit_vr = looks_like_vr(bytes.subspan(reader.position()));
  }
  reader.set_explicit(explicit_vr);

  DicomSlice slice;
  std::optional<Element> pixel_data;
  bool seen_rows = false, seen_cols = false, seen_bits = false, seen_repr = false;
  bool seen_spacing = false, seen_thickness = false, seen_position = false;

  while (!reader.at_end()) {
    Element e = reader.next();
    if (e.length == kUndefinedLength) {
      if (e.tag == kPixelData) {
        throw Error(ErrorCode::UnsupportedPixelFormat, "encapsulated pixel data");
      }
      reader.skip_undefined_sequence();
      continue;
    }
    switch (e.tag) {
      case kRows: slice.rows = as_u16(e); seen_rows = true; break;
      case kColumns: slice.cols = as_u16(e); seen_cols = true; break;
      case kBitsAllocated: slice.bits_allocated = as_u16(e); seen_bits = true; break;
      case kPixelRepresentation: slice.pixel_representation = as_u16(e); seen_repr = true; break;
      case kRescaleIntercept: slice.rescale_intercept = decimal_at(e, 0); break;
      case kRescaleSlope: slice.rescale_slope = decimal_at(e, 0); break;
      case kPixelSpacing: {
        auto v = as_decimals(e);
        if (v.size() < 2) throw Error(ErrorCode::MalformedElement, "PixelSpacing needs two values");
        slice.row_spacing_mm = v[0];
        slice.col_spacing_mm = v[1];
        seen_spacing = true;
        break;
      }
      case kSliceThickness: slice.slice_thickness_mm = decimal_at(e, 0); seen_thickness = true; break;
      case kImagePosition: slice.position_z_mm = decimal_at(e, 2); seen_position = true; break;
      case kPixelData: pixel_data = e; break;
      default: break;
    }
  }

  auto require = [](bool seen, std::uint32_t t) {
    if (!seen) throw Error(ErrorCode::MissingTag, tag_name(t));
  };
  require(seen_rows, kRows);
  require(seen_cols, kColumns);
  require(seen_bits, kBitsAllocated);
  require(seen_repr, kPixelRepresentation);
  require(seen_spacing, kPixelSpacing);
  require(seen_thickness, kSliceThickness);
  require(seen_position, kImagePosition);
  require(pixel_data.has_value(), kPixelData);

  if (slice.bits_allocated != 16) {
    throw Error(ErrorCode::UnsupportedPixelFormat, "BitsAllocated " + std::to_string(slice.bits_allocated));
  }
  if (slice.rows == 0 || slice.cols == 0) {
    throw Error(ErrorCode::MalformedElement, "zero rows or columns");
  }
  if (!(slice.row_spacing_mm > 0.0) || !(slice.col_spacing_mm > 0.0)) {
    throw Error(ErrorCode::MalformedElement, "PixelSpacing must be positive");
  }
  const std::size_t count = static_cast<std::size_t>(slice.rows) * slice.cols;
  if (pixel_data->value.size() < 2 * count) {
    throw Error(ErrorCode::MalformedElement, "PixelData holds " + std::to_string(pixel_data->value.size()) +
                                                 " bytes, expected " + std::to_string(2 * count));
  }
  slice.raw_pixels.resize(count);
  const std::uint8_t* p = pixel_data->value.data();
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint16_t word = detail::load_u16(p + 2 * i);
    slice.raw_pixels[i] = slice.pixel_representation == 1 ? static_cast<std::int16_t>(word)
                                                          : static_cast<std::int32_t>(word);
  }
  return slice;
}

DicomSlice read_dicom_file(const std::filesystem::path& path) {
  return parse_dicom_file(read_file_bytes(path));
}

Series assemble_series(std::vector<DicomSlice> slices) {
  if (slices.size() < 2) {
    throw Error(ErrorCode::InconsistentGeometry, "a series needs at least two slices");
  }
  const DicomSlice& ref = slices.front();
  for (const auto& s : slices) {
    if (s.rows != ref.rows || s.cols != ref.cols || std::abs(s.row_spacing_mm - ref.row_spacing_mm) > 1e-6 ||
        std::abs(s.col_spacing_mm - ref.col_spacing_mm) > 1e-6) {
      throw Error(ErrorCode::InconsistentGeometry, "slices disagree on size or pixel spacing");
    }
    if (s.raw_pixels.size() != static_cast<std::size_t>(s.rows) * s.cols) {
      throw Error(ErrorCode::InconsistentGeometry, "pixel count does not match rows x cols");
    }
  }
  std::stable_sort(slices.begin(), slices.end(),
                   [](const DicomSlice& a, const DicomSlice& b) { return a.position_z_mm < b.position_z_mm; });

  std::vector<double> gaps;
  for (std::size_t i = 1; i < slices.size(); ++i) {
    const double gap = slices[i].position_z_mm - slices[i - 1].position_z_mm;
    if (gap <= 0.0) {
      throw Error(ErrorCode::DuplicateSlicePosition, "two slices at z = " + std::to_string(slices[i].position_z_mm));
    }
    gaps.push_back(gap);
  }
  std::vector<double> sorted = gaps;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  const double median = sorted.size() % 2 == 1 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
  for (double g : gaps) {
    if (std::abs(g - median) > kSliceGapTolerance * median) {
      throw Error(ErrorCode::NonUniformSpacing,
                  "gap " + std::to_string(g) + " mm deviates from median " + std::to_string(median) + " mm");
    }
  }

  Series out;
  out.meta = {median, ref.row_spacing_mm, ref.col_spacing_mm, slices.size()};
  const Dims dims{slices.size(), ref.rows, ref.cols};
  out.volume = HuVolume(dims, Spacing{median, ref.row_spacing_mm, ref.col_spacing_mm});
  const std::size_t plane = static_cast<std::size_t>(ref.rows) * ref.cols;
  for (std::size_t z = 0; z < slices.size(); ++z) {
    const auto& s = slices[z];
    std::int16_t* dst = out.volume.voxels.data() + z * plane;
    for (std::size_t i = 0; i < plane; ++i) {
      dst[i] = to_hu(s.rescale_slope * s.raw_pixels[i] + s.rescale_intercept);
    }
  }
  return out;
}

Series load_series_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw Error(ErrorCode::Io, "not a directory: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<DicomSlice> slices;
  slices.reserve(files.size());
  for (const auto& f : files) slices.push_back(read_dicom_file(f));
  return assemble_series(std::move(slices));
}

// ---------------------------------------------------------------------------
// Writer

namespace {

std::string format_ds(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, res.ptr);
  if (s.size() > 16) {
    std::snprintf(buf, sizeof buf, "%.10g", v);
    s = buf;
  }
  return s;
}

class DatasetWriter {
 public:
  explicit DatasetWriter(bool explicit_vr) : explicit_(explicit_vr) {}

  void text(std::uint16_t g, std::uint16_t e, std::string_view vr, std::string value) {
    if (value.size() % 2 == 1) value.push_back(vr == "UI" ? '\0' : ' ');
    header(g, e, vr, static_cast<std::uint32_t>(value.size()));
    w_.put_bytes(value);
  }
  void us(std::uint16_t g, std::uint16_t e, std::uint16_t v) {
    header(g, e, "US", 2);
    w_.put_u16(v);
  }
  void ul(std::uint16_t g, std::uint16_t e, std::uint32_t v) {
    header(g, e, "UL", 4);
    w_.put_u32(v);
  }
  void binary(std::uint16_t g, std::uint16_t e, std::string_view vr, std::span<const std::uint8_t> data) {
    header(g, e, vr, static_cast<std::uint32_t>(data.size()));
    w_.put_bytes(data);
  }

  detail::ByteWriter& out() { return w_; }

 private:
  void header(std::uint16_t g, std::uint16_t e, std::string_view vr, std::uint32_t len) {
    w_.put_u16(g);
    w_.put_u16(e);
    if (explicit_) {
      w_.put_bytes(vr);
      if (has_long_length(vr)) {
        w_.put_u16(0);
        w_.put_u32(len);
      } else {
        w_.put_u16(static_cast<std::uint16_t>(len));
      }
    } else {
      w_.put_u32(len);
    }
  }

  bool explicit_;
  detail::ByteWriter w_;
};

}  // namespace

std::vector<std::uint8_t> encode_dicom_slice(const DicomSlice& slice, std::string_view transfer_syntax) {
  if (transfer_syntax != kExplicitVrLittleEndian && transfer_syntax != kImplicitVrLittleEndian) {
    throw Error(ErrorCode::UnsupportedTransferSyntax, std::string(transfer_syntax));
  }
  if (slice.raw_pixels.size() != static_cast<std::size_t>(slice.rows) * slice.cols) {
    throw Error(ErrorCode::ShapeMismatch, "raw_pixels does not hold rows x cols values");
  }

  DatasetWriter meta(true);
  static const std::uint8_t kVersion[2] = {0x00, 0x01};
  meta.binary(0x0002, 0x0001, "OB", kVersion);
  meta.text(0x0002, 0x0002, "UI", "1.2.840.10008.5.1.4.1.1.2");
  meta.text(0x0002, 0x0010, "UI", std::string(transfer_syntax));
  const auto meta_body = meta.out().take();

  DatasetWriter ds(transfer_syntax == kExplicitVrLittleEndian);
  ds.text(0x0018, 0x0050, "DS", format_ds(slice.slice_thickness_mm));
  ds.text(0x0020, 0x0032, "DS", "0\\0\\" + format_ds(slice.position_z_mm));
  ds.us(0x0028, 0x0002, 1);
  ds.text(0x0028, 0x0004, "CS", "MONOCHROME2");
  ds.us(0x0028, 0x0010, slice.rows);
  ds.us(0x0028, 0x0011, slice.cols);
  ds.text(0x0028, 0x0030, "DS", format_ds(slice.row_spacing_mm) + "\\" + format_ds(slice.col_spacing_mm));
  ds.us(0x0028, 0x0100, slice.bits_allocated);
  ds.us(0x0028, 0x0101, 16);
  ds.us(0x0028, 0x0102, 15);
  ds.us(0x0028, 0x0103, slice.pixel_representation);
  ds.text(0x0028, 0x1052, "DS", format_ds(slice.rescale_intercept));
  ds.text(0x0028, 0x1053, "DS", format_ds(slice.rescale_slope));
  std::vector<std::uint8_t> pixels;
  pixels.reserve(2 * slice.raw_pixels.size());
  for (std::int32_t v : slice.raw_pixels) {
    const auto word = static_cast<std::uint16_t>(v);
    pixels.push_back(static_cast<std::uint8_t>(word));
    pixels.push_back(static_cast<std::uint8_t>(word >> 8));
  }
  ds.binary(0x7FE0, 0x0010, "OW", pixels);

  detail::ByteWriter file;
  file.bytes().reserve(132 + 12 + meta_body.size() + ds.out().size());
  file.bytes().resize(128, 0);
  file.put_bytes("DICM");
  DatasetWriter group_length(true);
  group_length.ul(0x0002, 0x0000, static_cast<std::uint32_t>(meta_body.size()));
  file.put_bytes(group_length.out().bytes());
  file.put_bytes(meta_body);
  file.put_bytes(ds.out().bytes());
  return file.take();
}

}  // namespace lungprep
