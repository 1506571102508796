use std::collections::HashSet;

use crate::program::Configuration;

/// Depth-first zero-reachability by plain enumeration, independent of the
/// BFS arena. `successors` supplies the step relation. Returns `None` when
/// more than `max_states` configurations would be visited.
pub fn dfs_zero_reach<F>(
    start: Configuration<u64>,
    target: usize,
    max_states: usize,
    successors: F,
) -> Option<bool>
where
    F: Fn(&Configuration<u64>) -> Vec<Configuration<u64>>,
{
    let mut seen: HashSet<Configuration<u64>> = HashSet::new();
    let mut stack = vec![start];
    while let Some(c) = stack.pop() {
        if !seen.insert(c.clone()) {
            continue;
        }
        if seen.len() > max_states {
            return None;
        }
        if c.line == target && c.is_zero() {
            return Some(true);
        }
        for n in successors(&c).into_iter().rev() {
            if !seen.contains(&n) {
                stack.push(n);
            }
        }
    }
    Some(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::program::{parse_program, successors};

    #[test]
    fn agrees_on_small_programs() {
        let p = parse_program::<u64>("goto 2 or 4\nx -= 3\ngoto 1\nx += 1\nhalt").unwrap();
        for x in 0..=10 {
            let r = dfs_zero_reach(Configuration::new(1, vec![x]), 5, 1000, |c| successors(&p, c));
            assert_eq!(r, Some(false));
        }
        let q = parse_program::<u64>("goto 2 or 4\nx -= 2\ngoto 1\nhalt").unwrap();
        assert_eq!(dfs_zero_reach(Configuration::new(1, vec![4]), 4, 1000, |c| successors(&q, c)), Some(true));
        assert_eq!(dfs_zero_reach(Configuration::new(1, vec![3]), 4, 1000, |c| successors(&q, c)), Some(false));
    }
}
