//! Base transformations: adic odometers and rank-one towers.

mod digits;
mod rank_one;

pub use digits::{CarryLength, CylinderSet, DigitSystem, Point};
pub use rank_one::{
    build_tower, build_tower_bounded, oracle_tower_correlation, tower_correlation, tower_correlation_bounded,
    RankOneSchedule, StageRule, TowerModel, TowerStage, DEFAULT_MAX_HEIGHT,
};
