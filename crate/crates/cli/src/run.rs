//! Capped child-process runs.

use std::io;
use std::os::unix::process::CommandExt;
use std::process::Command;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use clap::ValueEnum;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Clock {
    /// User plus system CPU time of the child.
    Cpu,
    /// Elapsed wall-clock time.
    Wall,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    Finished { seconds: f64 },
    Capped,
    /// The child could not be started or exited abnormally.
    Failed(String),
}

const POLL: Duration = Duration::from_millis(1);

/// Wall-clock allowance for a CPU-capped child that mostly waits.
fn wall_guard(captime: f64) -> Duration {
    Duration::from_secs_f64((10.0 * captime + 1.0).min(1e9))
}

fn ticks_per_second() -> f64 {
    // SAFETY: sysconf has no preconditions.
    let t = unsafe { libc::sysconf(libc::_SC_CLK_TCK) };
    if t > 0 {
        t as f64
    } else {
        100.0
    }
}

/// CPU seconds used so far by a live process, from `/proc/<pid>/stat`.
fn cpu_so_far(pid: i32) -> Option<f64> {
    let stat = std::fs::read_to_string(format!("/proc/{pid}/stat")).ok()?;
    let rest = &stat[stat.rfind(')')? + 2..];
    let fields: Vec<&str> = rest.split_whitespace().collect();
    let utime: f64 = fields.get(11)?.parse().ok()?;
    let stime: f64 = fields.get(12)?.parse().ok()?;
    Some((utime + stime) / ticks_per_second())
}

fn kill_group(pid: i32) {
    // SAFETY: signalling a process group we created.
    unsafe {
        libc::kill(-pid, libc::SIGKILL);
    }
}

/// Reaps `pid` without blocking, returning its status and resource usage.
fn try_reap(pid: i32) -> io::Result<Option<(i32, libc::rusage)>> {
    let mut status = 0;
    // SAFETY: rusage is plain data; wait4 fills it in.
    let mut usage: libc::rusage = unsafe { std::mem::zeroed() };
    let r = unsafe { libc::wait4(pid, &mut status, libc::WNOHANG, &mut usage) };
    match r {
        0 => Ok(None),
        r if r == pid => Ok(Some((status, usage))),
        _ => Err(io::Error::last_os_error()),
    }
}

fn seconds(tv: libc::timeval) -> f64 {
    tv.tv_sec as f64 + tv.tv_usec as f64 * 1e-6
}

/// Runs `argv` once, stopping it when `clock` reaches `captime` seconds.
pub fn run_capped(argv: &[String], captime: f64, clock: Clock) -> Outcome {
    let Some((program, args)) = argv.split_first() else {
        return Outcome::Failed("empty command".into());
    };
    let mut cmd = Command::new(program);
    cmd.args(args)
        .stdin(std::process::Stdio::null())
        .stdout(std::process::Stdio::null());
    let cpu_limit = captime.ceil().max(1.0).min(u32::MAX as f64) as libc::rlim_t;
    // SAFETY: only async-signal-safe calls between fork and exec.
    unsafe {
        cmd.pre_exec(move || {
            if libc::setpgid(0, 0) != 0 {
                return Err(io::Error::last_os_error());
            }
            if clock == Clock::Cpu {
                let lim = libc::rlimit {
                    rlim_cur: cpu_limit,
                    rlim_max: cpu_limit + 1,
                };
                if libc::setrlimit(libc::RLIMIT_CPU, &lim) != 0 {
                    return Err(io::Error::last_os_error());
                }
            }
            Ok(())
        });
    }
    let start = Instant::now();
    let child = match cmd.spawn() {
        Ok(c) => c,
        Err(e) => return Outcome::Failed(format!("could not start {program}: {e}")),
    };
    let pid = child.id() as i32;
    let mut killed = false;
    loop {
        match try_reap(pid) {
            Err(e) => return Outcome::Failed(format!("wait failed: {e}")),
            Ok(Some((status, usage))) => {
                let wall = start.elapsed().as_secs_f64();
                let cpu = seconds(usage.ru_utime) + seconds(usage.ru_stime);
                let elapsed = match clock {
                    Clock::Cpu => cpu,
                    Clock::Wall => wall,
                };
                if killed || elapsed >= captime {
                    return Outcome::Capped;
                }
                if libc::WIFSIGNALED(status) {
                    let sig = libc::WTERMSIG(status);
                    if sig == libc::SIGXCPU {
                        return Outcome::Capped;
                    }
                    return Outcome::Failed(format!("killed by signal {sig}"));
                }
                let code = libc::WEXITSTATUS(status);
                if code != 0 {
                    return Outcome::Failed(format!("exited with status {code}"));
                }
                return Outcome::Finished { seconds: elapsed };
            }
            Ok(None) => {
                if !killed {
                    let over = match clock {
                        Clock::Wall => start.elapsed().as_secs_f64() >= captime,
                        Clock::Cpu => {
                            cpu_so_far(pid).is_some_and(|c| c >= captime) || start.elapsed() >= wall_guard(captime)
                        }
                    };
                    if over {
                        kill_group(pid);
                        killed = true;
                    }
                }
                std::thread::sleep(POLL);
            }
        }
    }
}

/// Runs every job on up to `parallel` workers, returning outcomes in job order.
pub fn run_all(jobs: &[Vec<String>], captime: f64, clock: Clock, parallel: usize) -> Vec<Outcome> {
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Outcome>>> = Mutex::new(vec![None; jobs.len()]);
    std::thread::scope(|s| {
        for _ in 0..parallel.max(1).min(jobs.len().max(1)) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= jobs.len() {
                    break;
                }
                let out = run_capped(&jobs[i], captime, clock);
                results.lock().expect("results lock")[i] = Some(out);
            });
        }
    });
    results
        .into_inner()
        .expect("results lock")
        .into_iter()
        .map(|o| o.expect("every job ran"))
        .collect()
}

/// Splits a command template and substitutes `{instance}` and `{seed}`.
pub fn expand(template: &[String], instance: &str, seed: u64) -> Vec<String> {
    template
        .iter()
        .map(|tok| tok.replace("{instance}", instance).replace("{seed}", &seed.to_string()))
        .collect()
}
