// Python bindings for the MMAE maneuver-identification core.

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mmae/experiments.hpp"

namespace py = pybind11;
using namespace mmae;

PYBIND11_MODULE(_core, m) {
  m.doc() = "MMAE maneuver identification: Kalman filter bank, motion "
            "models, single-track vehicle simulation and experiment "
            "runners";

  py::register_exception<ConfigError>(m, "ConfigError");
  py::register_exception<NumericalError>(m, "NumericalError");
  py::register_exception<IoError>(m, "IoError");

  // filter core -----------------------------------------------------
  py::class_<GaussianBelief>(m, "GaussianBelief")
      .def(py::init<>())
      .def(py::init([](const Vec4& mean, const Mat4& cov) {
             return GaussianBelief{mean, cov};
           }),
           py::arg("mean"), py::arg("cov"))
      .def_readwrite("mean", &GaussianBelief::mean)
      .def_readwrite("cov", &GaussianBelief::cov);

  py::class_<Innovation>(m, "Innovation")
      .def(py::init<>())
      .def(py::init([](const Vec2& residual, const Mat2& cov) {
             return Innovation{residual, cov};
           }),
           py::arg("residual"), py::arg("cov"))
      .def_readwrite("residual", &Innovation::residual)
      .def_readwrite("cov", &Innovation::cov);

  m.def("kf_predict", &kf_predict, py::arg("belief"), py::arg("transition"),
        py::arg("process_noise"));
  m.def("ekf_predict", &ekf_predict, py::arg("belief"), py::arg("propagate"),
        py::arg("jacobian"), py::arg("process_noise"));
  m.def("kf_update", &kf_update, py::arg("belief"), py::arg("measurement"),
        py::arg("measurement_matrix"), py::arg("measurement_noise"));
  m.def("gaussian_likelihood", &gaussian_likelihood, py::arg("innovation"));

  // motion models ---------------------------------------------------
  py::enum_<ManeuverKind>(m, "ManeuverKind")
      .value("Straight", ManeuverKind::Straight)
      .value("LeftLC", ManeuverKind::LeftLC)
      .value("RightLC", ManeuverKind::RightLC);

  py::enum_<Direction>(m, "Direction")
      .value("Left", Direction::Left)
      .value("Right", Direction::Right);

  py::enum_<JacobianMode>(m, "JacobianMode")
      .value("Simplified", JacobianMode::Simplified)
      .value("ExactAnalytic", JacobianMode::ExactAnalytic);

  py::class_<LaneChangeParams>(m, "LaneChangeParams")
      .def(py::init<>())
      .def(py::init([](double w, double l, double ts) {
             return LaneChangeParams{w, l, ts};
           }),
           py::arg("lane_width") = 3.5, py::arg("maneuver_length") = 150.0,
           py::arg("sample_time") = 0.01)
      .def_readwrite("lane_width", &LaneChangeParams::lane_width)
      .def_readwrite("maneuver_length", &LaneChangeParams::maneuver_length)
      .def_readwrite("sample_time", &LaneChangeParams::sample_time);

  py::class_<ManeuverModel>(m, "ManeuverModel")
      .def(py::init<>())
      .def(py::init([](ManeuverKind kind, const LaneChangeParams& params) {
             return ManeuverModel{kind, params};
           }),
           py::arg("kind"), py::arg("params") = LaneChangeParams{})
      .def_readwrite("kind", &ManeuverModel::kind)
      .def_readwrite("params", &ManeuverModel::params);

  m.def("straight_transition", &straight_transition, py::arg("sample_time"));
  m.def("lane_change_propagate", &lane_change_propagate, py::arg("state"),
        py::arg("params"), py::arg("direction"), py::arg("x_origin") = 0.0);
  m.def("lane_change_jacobian", &lane_change_jacobian, py::arg("state"),
        py::arg("params"), py::arg("direction"), py::arg("mode"),
        py::arg("x_origin") = 0.0);
  m.def("measurement_matrix", &measurement_matrix);
  m.def("reference_lane_change_path", &reference_lane_change_path,
        py::arg("dx"), py::arg("params"), py::arg("direction"));

  // bank --------------------------------------------------------------
  py::class_<NoiseConfig>(m, "NoiseConfig")
      .def(py::init<>())
      .def(py::init([](const Mat4& q, const Mat2& r) {
             return NoiseConfig{q, r};
           }),
           py::arg("process"), py::arg("measurement"))
      .def_readwrite("process", &NoiseConfig::process)
      .def_readwrite("measurement", &NoiseConfig::measurement);

  py::class_<FilterBank>(m, "FilterBank")
      .def_readonly("weights", &FilterBank::weights)
      .def_readonly("step_count", &FilterBank::step_count);

  py::class_<DetectionPolicy>(m, "DetectionPolicy")
      .def(py::init<>())
      .def(py::init([](double threshold, double dwell) {
             return DetectionPolicy{threshold, dwell};
           }),
           py::arg("threshold") = 0.9, py::arg("dwell") = 0.3)
      .def_readwrite("threshold", &DetectionPolicy::threshold)
      .def_readwrite("dwell", &DetectionPolicy::dwell);

  py::class_<DetectionResult>(m, "DetectionResult")
      .def_readonly("detected", &DetectionResult::detected)
      .def_readonly("detection_time", &DetectionResult::detection_time)
      .def_readonly("weight_trace", &DetectionResult::weight_trace)
      .def_readonly("switch_count", &DetectionResult::switch_count);

  m.def("init_bank", &init_bank, py::arg("models"), py::arg("x0"),
        py::arg("p0"), py::arg("noise"),
        py::arg("jacobian_mode") = JacobianMode::Simplified);
  m.def(
      "bank_step",
      [](FilterBank& bank, const Vec2& z) { return bank_step(bank, z); },
      py::arg("bank"), py::arg("measurement"));
  m.def("combine", &combine, py::arg("bank"));
  m.def("detect", &detect, py::arg("weight_trace"), py::arg("model_order"),
        py::arg("policy"), py::arg("sample_time"));

  // vehicle sim -------------------------------------------------------
  py::class_<VehicleParams>(m, "VehicleParams")
      .def(py::init<>())
      .def_readwrite("mass", &VehicleParams::mass)
      .def_readwrite("yaw_inertia", &VehicleParams::yaw_inertia)
      .def_readwrite("lf", &VehicleParams::lf)
      .def_readwrite("lr", &VehicleParams::lr)
      .def_readwrite("cornering_front", &VehicleParams::cornering_front)
      .def_readwrite("cornering_rear", &VehicleParams::cornering_rear);

  py::class_<VehicleState>(m, "VehicleState")
      .def(py::init<>())
      .def_readwrite("x", &VehicleState::x)
      .def_readwrite("y", &VehicleState::y)
      .def_readwrite("yaw", &VehicleState::yaw)
      .def_readwrite("vx", &VehicleState::vx)
      .def_readwrite("vy", &VehicleState::vy)
      .def_readwrite("yaw_rate", &VehicleState::yaw_rate);

  py::enum_<SteeringKind>(m, "SteeringKind")
      .value("Zero", SteeringKind::Zero)
      .value("SinusoidLC", SteeringKind::SinusoidLC);

  py::class_<SteeringProfile>(m, "SteeringProfile")
      .def(py::init<>())
      .def(py::init([](SteeringKind kind, double amplitude, double period,
                       Direction direction, double start_time) {
             return SteeringProfile{kind, amplitude, period, direction,
                                    start_time};
           }),
           py::arg("kind"), py::arg("amplitude"), py::arg("period"),
           py::arg("direction"), py::arg("start_time") = 0.0)
      .def_readwrite("kind", &SteeringProfile::kind)
      .def_readwrite("amplitude", &SteeringProfile::amplitude)
      .def_readwrite("period", &SteeringProfile::period)
      .def_readwrite("direction", &SteeringProfile::direction)
      .def_readwrite("start_time", &SteeringProfile::start_time);

  m.def("dynamics_derivative", &dynamics_derivative, py::arg("state"),
        py::arg("steering"), py::arg("params"));
  m.def("step_rk4", &step_rk4, py::arg("state"), py::arg("steering"),
        py::arg("params"), py::arg("dt"));
  m.def("step_rk4_profile", &step_rk4_profile, py::arg("state"),
        py::arg("profile"), py::arg("t"), py::arg("params"), py::arg("dt"));
  m.def("steering_profile_eval", &steering_profile_eval, py::arg("profile"),
        py::arg("t"));
  m.def("steady_state_yaw_rate", &steady_state_yaw_rate, py::arg("params"),
        py::arg("vx"), py::arg("steering"));
  m.def("calibrate_amplitude", &calibrate_amplitude, py::arg("params"),
        py::arg("vx"), py::arg("period"), py::arg("target_offset"),
        py::arg("dt") = 0.01);

  // measurements & experiments ------------------------------------------
  py::class_<MeasurementSample>(m, "MeasurementSample")
      .def_readonly("t", &MeasurementSample::t)
      .def_readonly("zx", &MeasurementSample::zx)
      .def_readonly("zy", &MeasurementSample::zy);

  py::class_<MeasurementSeries>(m, "MeasurementSeries")
      .def_readonly("samples", &MeasurementSeries::samples)
      .def_readonly("truth", &MeasurementSeries::truth)
      .def_readonly("seed", &MeasurementSeries::seed)
      .def_readonly("sample_time", &MeasurementSeries::sample_time);

  py::class_<NoiseSpec>(m, "NoiseSpec")
      .def(py::init<>())
      .def_readwrite("measurement_cov", &NoiseSpec::measurement_cov)
      .def_readwrite("process_cov", &NoiseSpec::process_cov);

  m.def("generate_from_model", &generate_from_model, py::arg("model"),
        py::arg("x0"), py::arg("n_steps"), py::arg("spec"), py::arg("seed"));
  m.def("write_series_csv", &write_series_csv, py::arg("series"),
        py::arg("path"), py::arg("config_json") = std::string());
  m.def("read_series_csv", &read_series_csv, py::arg("path"));

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def(py::init<>())
      .def_readwrite("stage", &ExperimentConfig::stage)
      .def_readwrite("maneuver", &ExperimentConfig::maneuver)
      .def_readwrite("q_diag", &ExperimentConfig::q_diag)
      .def_readwrite("r_diag", &ExperimentConfig::r_diag)
      .def_readwrite("p0_diag", &ExperimentConfig::p0_diag)
      .def_readwrite("x0", &ExperimentConfig::x0)
      .def_readwrite("lane_width", &ExperimentConfig::lane_width)
      .def_readwrite("maneuver_length", &ExperimentConfig::maneuver_length)
      .def_readwrite("sample_time", &ExperimentConfig::sample_time)
      .def_readwrite("run_duration", &ExperimentConfig::run_duration)
      .def_readwrite("policy", &ExperimentConfig::policy)
      .def_readwrite("jacobian_mode", &ExperimentConfig::jacobian_mode)
      .def_readwrite("n_seeds", &ExperimentConfig::n_seeds)
      .def_readwrite("seed0", &ExperimentConfig::seed0)
      .def_readwrite("truth_process_noise",
                     &ExperimentConfig::truth_process_noise)
      .def_readwrite("vehicle", &ExperimentConfig::vehicle)
      .def_readwrite("vehicle_speed", &ExperimentConfig::vehicle_speed)
      .def_readwrite("steering_period", &ExperimentConfig::steering_period)
      .def_readwrite("steering_amplitude",
                     &ExperimentConfig::steering_amplitude);

  py::enum_<Stage>(m, "Stage")
      .value("ModelTruth", Stage::ModelTruth)
      .value("VehicleTruth", Stage::VehicleTruth);

  py::class_<SeedResult>(m, "SeedResult")
      .def_readonly("seed", &SeedResult::seed)
      .def_readonly("detection", &SeedResult::detection)
      .def_readonly("confusion_time", &SeedResult::confusion_time)
      .def_readonly("weight_fluctuation", &SeedResult::weight_fluctuation);

  py::class_<ExperimentReport>(m, "ExperimentReport")
      .def_readonly("config", &ExperimentReport::config)
      .def_readonly("seeds", &ExperimentReport::seeds)
      .def_readonly("median_detection_time",
                    &ExperimentReport::median_detection_time)
      .def_readonly("iqr_detection_time",
                    &ExperimentReport::iqr_detection_time)
      .def_readonly("not_detected_fraction",
                    &ExperimentReport::not_detected_fraction)
      .def_readonly("mean_confusion_time",
                    &ExperimentReport::mean_confusion_time)
      .def_readonly("mean_weight_fluctuation",
                    &ExperimentReport::mean_weight_fluctuation);

  m.def("default_vehicle_config", &default_vehicle_config);
  m.def("run_case", &run_case, py::arg("config"));
  m.def("run_vehicle_eval", &run_vehicle_eval, py::arg("config"));
  m.def("config_to_json", &config_to_json, py::arg("config"));
  m.def("config_from_json", &config_from_json, py::arg("json_text"));
  m.def("report_to_json", &report_to_json, py::arg("report"));
  m.def("config_hash", &config_hash, py::arg("config"));
}
