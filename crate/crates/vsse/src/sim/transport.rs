//! Message transports.
//!
//! The protocol driver pushes every envelope through a [`Transport`] before
//! delivery, so the parties never exchange in-memory references. The
//! in-process transport is a FIFO queue; the loopback transport writes each
//! envelope as a JSON line over a real localhost TCP socket and reads it
//! back, exercising the full serialization path.

use std::collections::VecDeque;
use std::io::{self, BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream};

use super::messages::Envelope;

pub trait Transport {
    fn send(&mut self, env: &Envelope) -> io::Result<()>;
    fn recv(&mut self) -> io::Result<Envelope>;

    /// Sends one envelope and takes delivery of the next pending one.
    fn relay(&mut self, env: &Envelope) -> io::Result<Envelope> {
        self.send(env)?;
        self.recv()
    }
}

/// FIFO queue in process memory. Envelopes still round-trip through their
/// serialized form so both transports exercise the same encoding.
#[derive(Default)]
pub struct InProcess {
    queue: VecDeque<String>,
}

impl InProcess {
    pub fn new() -> Self {
        Self::default()
    }
}

impl Transport for InProcess {
    fn send(&mut self, env: &Envelope) -> io::Result<()> {
        let line = serde_json::to_string(env).map_err(io::Error::other)?;
        self.queue.push_back(line);
        Ok(())
    }

    fn recv(&mut self) -> io::Result<Envelope> {
        let line = self
            .queue
            .pop_front()
            .ok_or_else(|| io::Error::new(io::ErrorKind::WouldBlock, "transport queue empty"))?;
        serde_json::from_str(&line).map_err(io::Error::other)
    }
}

/// Localhost TCP relay: a background thread accepts one connection and
/// echoes every line back. What the driver receives has genuinely crossed
/// a socket.
pub struct TcpLoopback {
    reader: BufReader<TcpStream>,
    writer: TcpStream,
    relay: Option<std::thread::JoinHandle<()>>,
}

impl TcpLoopback {
    pub fn new() -> io::Result<Self> {
        let listener = TcpListener::bind("127.0.0.1:0")?;
        let addr = listener.local_addr()?;
        let relay = std::thread::spawn(move || {
            if let Ok((stream, _)) = listener.accept() {
                let mut reader = BufReader::new(stream.try_clone().expect("clone accepted socket"));
                let mut writer = stream;
                let mut line = String::new();
                loop {
                    line.clear();
                    match reader.read_line(&mut line) {
                        Ok(0) | Err(_) => break,
                        Ok(_) => {
                            if writer.write_all(line.as_bytes()).is_err() {
                                break;
                            }
                        }
                    }
                }
            }
        });
        let stream = TcpStream::connect(addr)?;
        Ok(TcpLoopback {
            reader: BufReader::new(stream.try_clone()?),
            writer: stream,
            relay: Some(relay),
        })
    }
}

impl Transport for TcpLoopback {
    fn send(&mut self, env: &Envelope) -> io::Result<()> {
        let mut line = serde_json::to_string(env).map_err(io::Error::other)?;
        line.push('\n');
        self.writer.write_all(line.as_bytes())
    }

    fn recv(&mut self) -> io::Result<Envelope> {
        let mut line = String::new();
        let n = self.reader.read_line(&mut line)?;
        if n == 0 {
            return Err(io::Error::new(io::ErrorKind::UnexpectedEof, "relay closed"));
        }
        serde_json::from_str(&line).map_err(io::Error::other)
    }
}

impl Drop for TcpLoopback {
    fn drop(&mut self) {
        let _ = self.writer.shutdown(std::net::Shutdown::Both);
        if let Some(handle) = self.relay.take() {
            let _ = handle.join();
        }
    }
}
