#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "vws/butterworth.hpp"
#include "vws/config.hpp"
#include "vws/drivetrain.hpp"
#include "vws/encoder.hpp"
#include "vws/error.hpp"
#include "vws/evaluate.hpp"
#include "vws/experiment.hpp"
#include "vws/nn/model.hpp"
#include "vws/nn/optimizer.hpp"
#include "vws/nn/train.hpp"
#include "vws/pso.hpp"
#include "vws/signal.hpp"

namespace py = pybind11;
using namespace vws;

namespace {

// [step][dim] lists <-> Sequence
nn::Sequence to_sequence(const std::vector<std::vector<double>>& rows) {
  require(!rows.empty(), "empty-input");
  nn::Sequence seq = nn::Sequence::zeros(rows.size(), rows[0].size());
  for (std::size_t t = 0; t < rows.size(); ++t) {
    require(rows[t].size() == seq.dim, "empty-input", "ragged input rows");
    std::copy(rows[t].begin(), rows[t].end(), seq.row(t));
  }
  return seq;
}

std::vector<std::vector<double>> from_sequence(const nn::Sequence& seq) {
  std::vector<std::vector<double>> rows(seq.steps, std::vector<double>(seq.dim));
  for (std::size_t t = 0; t < seq.steps; ++t)
    std::copy(seq.row(t), seq.row(t) + seq.dim, rows[t].begin());
  return rows;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "virtual wheel-speed sensor lab: simulation, sensor models, filters, "
            "sequence models and evaluation";

  py::register_exception<Error>(m, "VwsError");

  // --- signals ---------------------------------------------------------
  py::class_<Segment>(m, "Segment")
      .def(py::init<>())
      .def_readwrite("maneuver_id", &Segment::maneuver_id)
      .def_readwrite("begin", &Segment::begin)
      .def_readwrite("end", &Segment::end);

  py::class_<SignalFrame>(m, "SignalFrame")
      .def(py::init<>())
      .def_readwrite("sample_rate", &SignalFrame::sample_rate)
      .def_readwrite("t0", &SignalFrame::t0)
      .def_readwrite("segments", &SignalFrame::segments)
      .def("length", &SignalFrame::length)
      .def("channel_names",
           [](const SignalFrame& f) {
             std::vector<std::string> names;
             for (const auto& [n, _] : f.channels) names.push_back(n);
             return names;
           })
      .def("channel",
           [](const SignalFrame& f, const std::string& name) { return f.channel(name); })
      .def("add_channel",
           [](SignalFrame& f, const std::string& name, std::vector<double> data) {
             f.add_channel(name, std::move(data));
           })
      .def("maneuver_ids", &SignalFrame::maneuver_ids)
      .def("validate", &SignalFrame::validate);

  m.def("zoh_resample", &zoh_resample, py::arg("frame"), py::arg("target_rate"));
  m.def(
      "rot_to_translational",
      [](const std::vector<double>& omega, double radius, double gear_ratio) {
        return rot_to_translational(omega, radius, gear_ratio);
      },
      py::arg("omega"), py::arg("radius"), py::arg("gear_ratio") = 1.0);
  m.def("split_by_maneuver", &split_by_maneuver, py::arg("frame"), py::arg("fractions"),
        py::arg("seed"));
  m.def("read_dataset_csv", &read_dataset_csv, py::arg("path"));
  m.def("write_dataset_csv", &write_dataset_csv, py::arg("frame"), py::arg("path"),
        py::arg("comments") = std::vector<std::string>{});

  // --- drivetrain simulation -------------------------------------------
  py::class_<DrivetrainParams>(m, "DrivetrainParams")
      .def(py::init<>())
      .def_readwrite("motor_inertia", &DrivetrainParams::motor_inertia)
      .def_readwrite("wheel_inertia", &DrivetrainParams::wheel_inertia)
      .def_readwrite("shaft_stiffness", &DrivetrainParams::shaft_stiffness)
      .def_readwrite("shaft_damping", &DrivetrainParams::shaft_damping)
      .def_readwrite("backlash_half", &DrivetrainParams::backlash_half)
      .def_readwrite("gear_ratio", &DrivetrainParams::gear_ratio)
      .def_readwrite("tire_radius", &DrivetrainParams::tire_radius)
      .def_readwrite("vehicle_mass", &DrivetrainParams::vehicle_mass)
      .def_readwrite("track_width", &DrivetrainParams::track_width)
      .def_readwrite("roll_resist", &DrivetrainParams::roll_resist)
      .def_readwrite("drag_coeff", &DrivetrainParams::drag_coeff)
      .def("wheel_side_inertia", &DrivetrainParams::wheel_side_inertia);

  py::class_<ProfileKnot>(m, "ProfileKnot")
      .def(py::init<double, double>(), py::arg("t"), py::arg("value"))
      .def_readwrite("t", &ProfileKnot::t)
      .def_readwrite("value", &ProfileKnot::value);

  py::class_<ManeuverScript>(m, "ManeuverScript")
      .def(py::init<>())
      .def_readwrite("name", &ManeuverScript::name)
      .def_readwrite("duration", &ManeuverScript::duration)
      .def_readwrite("drive_torque", &ManeuverScript::drive_torque)
      .def_readwrite("brake_torque", &ManeuverScript::brake_torque)
      .def_readwrite("yaw_rate", &ManeuverScript::yaw_rate)
      .def_readwrite("surface_noise_std", &ManeuverScript::surface_noise_std)
      .def_readwrite("impulse_events", &ManeuverScript::impulse_events);

  m.def("simulate", &simulate, py::arg("params"), py::arg("script"), py::arg("dt"),
        py::arg("seed"));
  m.def("standard_scenario_suite", &standard_scenario_suite, py::arg("seed"),
        py::arg("total_duration_s") = 3600.0, py::arg("variants_per_type") = 3);

  // --- sensor models -----------------------------------------------------
  py::enum_<EncoderMode>(m, "EncoderMode")
      .value("FREQUENCY_COUNT", EncoderMode::kFrequencyCount)
      .value("PERIOD_MEASURE", EncoderMode::kPeriodMeasure);

  py::class_<EncoderConfig>(m, "EncoderConfig")
      .def(py::init<>())
      .def_readwrite("ticks_per_rev", &EncoderConfig::ticks_per_rev)
      .def_readwrite("mode", &EncoderConfig::mode)
      .def_readwrite("window", &EncoderConfig::window)
      .def_readwrite("min_speed_timeout", &EncoderConfig::min_speed_timeout)
      .def_readwrite("quantize_output", &EncoderConfig::quantize_output);

  m.def("tick_displacement", &tick_displacement, py::arg("cfg"), py::arg("radius"));
  m.def(
      "encode_wheel_speed",
      [](const std::vector<double>& speed, double rate, const EncoderConfig& cfg,
         std::uint64_t seed) { return encode_wheel_speed(speed, rate, cfg, seed); },
      py::arg("true_speed"), py::arg("rate"), py::arg("cfg"), py::arg("seed"));
  m.def(
      "sense_motor_speed",
      [](const std::vector<double>& speed, double noise_std, std::uint64_t seed) {
        return sense_motor_speed(speed, noise_std, seed);
      },
      py::arg("true_motor_speed"), py::arg("noise_std"), py::arg("seed"));
  m.def("degrade_frame", &degrade_frame, py::arg("truth"), py::arg("sp_cfg"),
        py::arg("ref_cfg"), py::arg("motor_noise_std"), py::arg("seed"));

  // --- filters -----------------------------------------------------------
  py::class_<FilterCoeffs>(m, "FilterCoeffs")
      .def_readonly("b", &FilterCoeffs::b)
      .def_readonly("a", &FilterCoeffs::a)
      .def_readonly("poles", &FilterCoeffs::poles);

  m.def("butterworth_design", &butterworth_design, py::arg("order"), py::arg("cutoff_hz"),
        py::arg("sample_rate_hz"));
  m.def(
      "filter_causal",
      [](const std::vector<double>& x, const FilterCoeffs& c) { return filter_causal(x, c); },
      py::arg("signal"), py::arg("coeffs"));
  m.def(
      "filter_zero_phase",
      [](const std::vector<double>& x, const FilterCoeffs& c, int shift) {
        return filter_zero_phase(x, c, shift);
      },
      py::arg("signal"), py::arg("coeffs"), py::arg("shift") = 0);

  // --- PSO ----------------------------------------------------------------
  py::class_<SearchDim>(m, "SearchDim")
      .def(py::init<>())
      .def_readwrite("name", &SearchDim::name)
      .def_readwrite("lower", &SearchDim::lower)
      .def_readwrite("upper", &SearchDim::upper)
      .def_readwrite("integer", &SearchDim::integer);

  py::class_<SearchSpace>(m, "SearchSpace")
      .def(py::init<>())
      .def_readwrite("dims", &SearchSpace::dims);

  py::class_<PsoResult>(m, "PsoResult")
      .def_readonly("best_point", &PsoResult::best_point)
      .def_readonly("best_cost", &PsoResult::best_cost)
      .def_readonly("history", &PsoResult::history);

  m.def(
      "pso_minimize",
      [](const std::function<double(std::vector<double>)>& objective, const SearchSpace& space,
         std::size_t particles, std::size_t iterations, std::uint64_t seed) {
        const Objective wrapped = [&](std::span<const double> x) {
          return objective(std::vector<double>(x.begin(), x.end()));
        };
        return pso_minimize(wrapped, space, particles, iterations, seed);
      },
      py::arg("objective"), py::arg("space"), py::arg("particles"), py::arg("iterations"),
      py::arg("seed"));

  // --- sequence models -----------------------------------------------------
  py::enum_<nn::Arch>(m, "Arch")
      .value("GRU", nn::Arch::kGru)
      .value("LSTM", nn::Arch::kLstm)
      .value("TCN", nn::Arch::kTcn);

  py::class_<nn::ModelSpec>(m, "ModelSpec")
      .def(py::init<>())
      .def_readwrite("arch", &nn::ModelSpec::arch)
      .def_readwrite("input_size", &nn::ModelSpec::input_size)
      .def_readwrite("output_size", &nn::ModelSpec::output_size)
      .def_readwrite("hidden_size", &nn::ModelSpec::hidden_size)
      .def_readwrite("tcn_layers", &nn::ModelSpec::tcn_layers)
      .def_readwrite("kernel_size", &nn::ModelSpec::kernel_size)
      .def_readwrite("seed", &nn::ModelSpec::seed)
      .def("receptive_field", &nn::ModelSpec::receptive_field);

  m.def("init_weights", &nn::init_weights, py::arg("spec"));
  m.def(
      "model_forward",
      [](const nn::ModelSpec& spec, const std::vector<double>& weights,
         const std::vector<std::vector<double>>& x) {
        const nn::Sequence xs = to_sequence(x);
        nn::Sequence y;
        nn::model_forward(spec, weights, xs, y);
        return from_sequence(y);
      },
      py::arg("spec"), py::arg("weights"), py::arg("x"));
  m.def(
      "model_backward",
      [](const nn::ModelSpec& spec, const std::vector<double>& weights,
         const std::vector<std::vector<double>>& x, const std::vector<std::vector<double>>& target,
         std::size_t washout) {
        const nn::Sequence xs = to_sequence(x);
        const nn::Sequence ts = to_sequence(target);
        std::vector<double> grad(weights.size(), 0.0);
        const double loss = nn::model_backward(spec, weights, xs, ts, washout, grad);
        return py::make_tuple(loss, grad);
      },
      py::arg("spec"), py::arg("weights"), py::arg("x"), py::arg("target"),
      py::arg("washout") = 0);
  m.def("flops_per_step", &nn::flops_per_step, py::arg("spec"));
  m.def("ecu_budget", &nn::ecu_budget, py::arg("flops_per_step"), py::arg("rate_hz"),
        py::arg("clock_hz"), py::arg("flops_per_cycle"));
  m.def("cosine_lr", &nn::cosine_lr, py::arg("step"), py::arg("total_steps"), py::arg("lr_max"),
        py::arg("lr_min"));

  // --- evaluation -----------------------------------------------------------
  py::class_<MethodResult>(m, "MethodResult")
      .def_readonly("method", &MethodResult::method)
      .def_readonly("per_segment", &MethodResult::per_segment)
      .def_readonly("overall_mae", &MethodResult::overall_mae)
      .def_readonly("summary", &MethodResult::summary)
      .def_readonly("present", &MethodResult::present);

  m.def("evaluate_method", &evaluate_method, py::arg("name"), py::arg("prediction_mps"),
        py::arg("reference_mps"), py::arg("segments"), py::arg("washout") = 0);
}
