use crate::{CliError, Command};

mod characterize;
mod learn;
mod probe;
mod stream;

pub fn run_command(command: Command) -> Result<(), CliError> {
    match command {
        Command::Characterize(args) => characterize::run(args),
        Command::Dataset(args) => learn::run_dataset(args),
        Command::Train(args) => learn::run_train(args),
        Command::Eval(args) => learn::run_eval(args),
        Command::ProbeSuite(args) => probe::run(args),
        Command::Stream(args) => stream::run(args),
    }
}
