//! Parser checks shared by the corpus test and the fuzz targets: no input may
//! panic, and anything accepted must survive a write/read round trip.

use sphere_spde::config::ExperimentConfig;
use sphere_spde::spectrum::CoefficientField;
use sphere_spde::trajectory::Trajectory;

pub fn config_json(data: &[u8]) {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(cfg) = ExperimentConfig::from_json(text) {
        let back = ExperimentConfig::from_json(&cfg.to_json()).expect("own JSON parses");
        assert_eq!(back, cfg);
        if cfg.validate().is_ok() {
            let again =
                ExperimentConfig::from_header(cfg.header().as_bytes()).expect("own header parses");
            assert_eq!(again, cfg);
        }
    }
    let _ = ExperimentConfig::default().merge_json(text);
}

/// Input is `key`, a newline, then `value`.
pub fn config_override(data: &[u8]) {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let (key, value) = text.split_once('\n').unwrap_or((text, ""));
    let mut cfg = ExperimentConfig::default();
    if cfg.apply_override(key, value).is_ok() {
        let _ = cfg.validate();
    }
}

pub fn config_header(data: &[u8]) {
    if let Ok(cfg) = ExperimentConfig::from_header(data) {
        let _ = cfg.validate();
    }
}

pub fn coefficient_csv(data: &[u8]) {
    if let Ok(field) = CoefficientField::read_csv(data) {
        let mut buf = Vec::new();
        field.write_csv(&mut buf).expect("write to memory");
        let back = CoefficientField::read_csv(buf.as_slice()).expect("own output parses");
        assert_eq!(back, field);
    }
}

pub fn trajectory_csv(data: &[u8]) {
    if let Ok(traj) = Trajectory::read_csv(data) {
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).expect("write to memory");
        let back = Trajectory::read_csv(buf.as_slice()).expect("own output parses");
        assert_eq!(back, traj);
    }
}
