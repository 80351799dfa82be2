#pragma once

#include <cstddef>
#include <vector>

namespace physvid {

// Planar float image, layout [c][y][x].
struct Image {
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<float> data;

    Image() = default;
    Image(int c, int h, int w, float fill = 0.f)
        : channels(c), height(h), width(w), data(size_t(c) * h * w, fill) {}

    float& at(int c, int y, int x) { return data[(size_t(c) * height + y) * width + x]; }
    float at(int c, int y, int x) const { return data[(size_t(c) * height + y) * width + x]; }
    size_t numel() const { return data.size(); }
};

// Contiguous float video, layout [t][c][y][x].
struct Video {
    int frames = 0;
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<float> data;

    Video() = default;
    Video(int t, int c, int h, int w, float fill = 0.f)
        : frames(t), channels(c), height(h), width(w), data(size_t(t) * c * h * w, fill) {}

    size_t frame_stride() const { return size_t(channels) * height * width; }
    float* frame_ptr(int t) { return data.data() + size_t(t) * frame_stride(); }
    const float* frame_ptr(int t) const { return data.data() + size_t(t) * frame_stride(); }

    float& at(int t, int c, int y, int x) {
        return data[((size_t(t) * channels + c) * height + y) * width + x];
    }
    float at(int t, int c, int y, int x) const {
        return data[((size_t(t) * channels + c) * height + y) * width + x];
    }

    Image frame(int t) const {
        Image im(channels, height, width);
        const float* p = frame_ptr(t);
        im.data.assign(p, p + frame_stride());
        return im;
    }
    void set_frame(int t, const Image& im) {
        std::copy(im.data.begin(), im.data.end(), frame_ptr(t));
    }
    size_t numel() const { return data.size(); }
};

}  // namespace physvid
