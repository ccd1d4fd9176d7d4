export default function log(msg) {
  console.log(`[log] ${msg}`);
}
