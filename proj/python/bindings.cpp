#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>

#include "dmcn/data.hpp"
#include "dmcn/metrics.hpp"
#include "dmcn/model.hpp"
#include "dmcn/train.hpp"

namespace py = pybind11;
using namespace dmcn;

namespace {

Image image_from_array(py::array_t<float, py::array::c_style |
                                              py::array::forcecast> arr) {
  if (arr.ndim() == 2) {
    Image img(static_cast<int>(arr.shape(1)), static_cast<int>(arr.shape(0)),
              1);
    std::copy(arr.data(), arr.data() + arr.size(), img.samples.begin());
    return img;
  }
  if (arr.ndim() == 3 && (arr.shape(2) == 1 || arr.shape(2) == 3)) {
    Image img(static_cast<int>(arr.shape(1)), static_cast<int>(arr.shape(0)),
              static_cast<int>(arr.shape(2)));
    std::copy(arr.data(), arr.data() + arr.size(), img.samples.begin());
    return img;
  }
  throw contract_error(
      "expected an (h, w) or (h, w, {1,3}) float array of samples in [0, 1]");
}

py::array_t<float> image_to_array(const Image& img) {
  py::array_t<float> out(img.channels == 1
                             ? std::vector<py::ssize_t>{img.height, img.width}
                             : std::vector<py::ssize_t>{img.height, img.width,
                                                        img.channels});
  std::copy(img.samples.begin(), img.samples.end(),
            out.mutable_data());
  return out;
}

}  // namespace

PYBIND11_MODULE(_dmcn, m) {
  m.doc() = "DMCN super-resolution core bindings";

  py::register_exception<contract_error>(m, "ContractError",
                                         PyExc_ValueError);
  py::register_exception<parse_error>(m, "ParseError", PyExc_ValueError);

  py::class_<ModelConfig>(m, "ModelConfig")
      .def(py::init<>())
      .def_readwrite("channels", &ModelConfig::channels)
      .def_readwrite("kernel", &ModelConfig::kernel)
      .def_readwrite("blocks_per_stage", &ModelConfig::blocks_per_stage)
      .def_readwrite("enable_local_memory", &ModelConfig::enable_local_memory)
      .def_readwrite("enable_global_memory",
                     &ModelConfig::enable_global_memory)
      .def_readwrite("enable_hourglass", &ModelConfig::enable_hourglass)
      .def_readwrite("input_channels", &ModelConfig::input_channels)
      .def_readwrite("seed", &ModelConfig::seed)
      .def("__eq__",
           [](const ModelConfig& a, const ModelConfig& b) { return a == b; });

  m.def("count_layers", &count_layers, py::arg("config"));

  m.def(
      "estimate_flops",
      [](const ModelConfig& cfg, int h, int w) {
        FlopReport r = estimate_flops(cfg, h, w);
        py::list rows;
        for (const auto& l : r.layers)
          rows.append(py::make_tuple(l.name, l.term));
        return py::make_tuple(r.total, rows);
      },
      py::arg("config"), py::arg("input_h") = 48, py::arg("input_w") = 48,
      "Returns (total, [(layer_name, term), ...]).");

  m.def(
      "estimate_flops_flat_equivalent",
      [](const ModelConfig& cfg, int h, int w) {
        return estimate_flops_flat_equivalent(cfg, h, w).total;
      },
      py::arg("config"), py::arg("input_h") = 48, py::arg("input_w") = 48);

  m.def(
      "bicubic_resize",
      [](py::array_t<float, py::array::c_style | py::array::forcecast> arr,
         int out_w, int out_h) {
        return image_to_array(bicubic_resize(image_from_array(arr), out_w,
                                             out_h));
      },
      py::arg("image"), py::arg("out_w"), py::arg("out_h"));

  m.def(
      "make_ilr",
      [](py::array_t<float, py::array::c_style | py::array::forcecast> arr,
         int scale) {
        auto [ilr, hr] = make_ilr(image_from_array(arr), {scale});
        return py::make_tuple(image_to_array(ilr), image_to_array(hr));
      },
      py::arg("image"), py::arg("scale") = 2,
      "Returns (ilr, hr_cropped).");

  m.def(
      "psnr",
      [](py::array_t<float, py::array::c_style | py::array::forcecast> a,
         py::array_t<float, py::array::c_style | py::array::forcecast> b,
         double peak) {
        return psnr(image_from_array(a), image_from_array(b), peak);
      },
      py::arg("a"), py::arg("b"), py::arg("peak") = 1.0);

  m.def(
      "ssim",
      [](py::array_t<float, py::array::c_style | py::array::forcecast> a,
         py::array_t<float, py::array::c_style | py::array::forcecast> b,
         double peak) {
        return ssim(image_from_array(a), image_from_array(b), peak);
      },
      py::arg("a"), py::arg("b"), py::arg("peak") = 1.0);

  py::class_<Model<float>>(m, "Model")
      .def_property_readonly("config",
                             [](const Model<float>& m_) { return m_.config; })
      .def_property_readonly(
          "num_layers",
          [](const Model<float>& m_) { return count_layers(m_.config); })
      .def(
          "forward",
          [](const Model<float>& model,
             py::array_t<float, py::array::c_style | py::array::forcecast>
                 arr) {
            Image img = image_from_array(arr);
            TensorF y = model.forward(image_to_tensor(img));
            for (auto& v : y.data) v = std::min(1.0f, std::max(0.0f, v));
            return image_to_array(tensor_to_image(y));
          },
          py::arg("image"),
          "Run the network on a single-channel image array; output clamped "
          "to [0, 1].")
      .def("save",
           [](Model<float>& model, const std::string& path) {
             save_checkpoint(path, model, {}, 0, {});
           })
      .def(
          "train_steps",
          [](Model<float>& model,
             py::array_t<float, py::array::c_style | py::array::forcecast>
                 hr,
             py::array_t<float, py::array::c_style | py::array::forcecast>
                 ilr,
             int epochs, double lr0, int batch_size, unsigned seed) {
            if (hr.ndim() != 3 || ilr.ndim() != 3 ||
                hr.shape(0) != ilr.shape(0))
              throw contract_error(
                  "expected matching (n, h, w) hr and ilr stacks");
            PatchSet set;
            for (py::ssize_t i = 0; i < hr.shape(0); ++i) {
              PatchPair p;
              p.hr = image_from_array(py::array_t<float>(hr[py::int_(i)]));
              p.ilr = image_from_array(py::array_t<float>(ilr[py::int_(i)]));
              set.items.push_back(std::move(p));
            }
            TrainConfig tc;
            tc.epochs = epochs;
            tc.lr0 = lr0;
            tc.batch_size = batch_size;
            tc.seed = seed;
            OptimizerState opt;
            auto stats = train(model, set, tc, opt);
            std::vector<double> losses;
            for (const auto& s : stats) losses.push_back(s.mean_loss);
            return losses;
          },
          py::arg("hr"), py::arg("ilr"), py::arg("epochs") = 1,
          py::arg("lr0") = 5e-4, py::arg("batch_size") = 128,
          py::arg("seed") = 0,
          "L1/Adam training on in-memory patch stacks; returns per-epoch "
          "mean losses.");

  m.def("build_model", &build_model<float>, py::arg("config"));
  m.def("load_model", [](const std::string& path) {
    return restore_model(load_checkpoint(path));
  });
}
