//! Fixed-configuration baseline: always the default (CST, power) pair.

use crate::error::{Error, Result};
use crate::mac::Action;

pub fn static_select_action(action_set: &[Action], default: &Action) -> Result<usize> {
    action_set.iter().position(|a| a == default).ok_or_else(|| {
        Error::config(
            "actions.default",
            format!(
                "default action (cst {}, power {}) is not in the action set",
                default.cst, default.tx_power
            ),
        )
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_default() {
        let toy = [
            Action::new(-72.0, 10.0),
            Action::new(-72.0, 20.0),
            Action::new(-82.0, 10.0),
            Action::new(-82.0, 20.0),
        ];
        assert_eq!(
            static_select_action(&toy, &Action::new(-82.0, 20.0)).unwrap(),
            3
        );
        assert!(static_select_action(&toy[..3], &Action::new(-82.0, 20.0)).is_err());
    }
}
