//! Builds a two-stage queue network by hand and checks Little's law.

use disagg_sim::kernel::{BernoulliSource, EngineBuilder, QueueModuleSpec, StopCondition};

fn main() -> disagg_sim::Result<()> {
    let rate = 0.3;
    let mut b = EngineBuilder::new(42);
    let front = b.add_module(QueueModuleSpec::new("front", 64, 2, 0))?;
    let back = b.add_module(QueueModuleSpec::new("back", 64, 3, 10).with_servers(2))?;
    let route = b.add_route(&[front, back])?;

    let report = b
        .build(BernoulliSource::new(rate, route))?
        .run(StopCondition::MaxCycles(200_000))?;

    println!("retired {} in {} cycles", report.retired, report.cycles);
    for (name, serv, delay) in [("front", 2, 0), ("back", 3, 10)] {
        let s = &report.per_module[name];
        let l = s.mean_occupancy;
        let lw = rate * s.mean_transit(serv, delay);
        println!("{name:>5}: busy {:.3}  L {l:.3}  lambda*W {lw:.3}", s.busy_fraction);
    }
    Ok(())
}
